#include "lauricella/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "lauricella/error.hpp"

namespace lauricella {

namespace {

// a + b*eps with Gaussian-rational a, b
struct Lin {
    QG a, b;
    bool constant() const { return b.is_zero(); }
};

// A call argument: scalar or {list}
struct Item {
    bool list = false;
    std::vector<Lin> values;
    std::vector<size_t> cols;
    size_t col = 0;
};

class Parser {
public:
    Parser(const std::string& text, const std::string& eps) : s_(text), eps_(eps) {}

    std::string head;
    size_t head_col = 0;

    std::vector<Item> call() {
        skip();
        head_col = pos_;
        head = ident();
        if (head.empty()) fail("expected a function name");
        skip();
        char close;
        if (peek() == '[') close = ']';
        else if (peek() == '(') close = ')';
        else fail("expected '[' or '('");
        ++pos_;
        std::vector<Item> items;
        for (;;) {
            items.push_back(item());
            skip();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() != close) fail(std::string("expected ',' or '") + close + "'");
            ++pos_;
            break;
        }
        skip();
        if (pos_ < s_.size()) fail("unexpected text after the closing bracket");
        return items;
    }

    [[noreturn]] void fail(const std::string& what, size_t at = std::string::npos) const {
        size_t c = at == std::string::npos ? pos_ : at;
        throw Error(ErrorCode::usage, "syntax error", "column " + std::to_string(c + 1) + ": " + what);
    }

private:
    const std::string& s_;
    const std::string& eps_;
    size_t pos_ = 0;

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::string ident() {
        size_t b = pos_;
        if (!ident_start(peek())) return "";
        while (ident_char(peek())) ++pos_;
        return s_.substr(b, pos_ - b);
    }

    Item item() {
        skip();
        Item it;
        it.col = pos_;
        if (peek() == '{') {
            it.list = true;
            ++pos_;
            for (;;) {
                skip();
                it.cols.push_back(pos_);
                it.values.push_back(expr());
                skip();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                if (peek() != '}') fail("expected ',' or '}'");
                ++pos_;
                break;
            }
        } else {
            it.cols.push_back(pos_);
            it.values.push_back(expr());
        }
        return it;
    }

    Lin expr() {
        Lin v = term();
        for (;;) {
            skip();
            char c = peek();
            if (c != '+' && c != '-') return v;
            ++pos_;
            Lin w = term();
            v = c == '+' ? Lin{v.a + w.a, v.b + w.b} : Lin{v.a - w.a, v.b - w.b};
        }
    }

    Lin term() {
        Lin v = unary();
        for (;;) {
            skip();
            char c = peek();
            if (c != '*' && c != '/') return v;
            size_t at = pos_++;
            Lin w = unary();
            if (c == '*') {
                if (!v.constant() && !w.constant()) fail("product is not linear in " + eps_, at);
                v = v.constant() ? Lin{v.a * w.a, v.a * w.b} : Lin{v.a * w.a, v.b * w.a};
            } else {
                if (!w.constant()) fail("division by an expression in " + eps_, at);
                if (w.a.is_zero()) fail("division by zero", at);
                v = Lin{v.a / w.a, v.b / w.a};
            }
        }
    }

    Lin unary() {
        skip();
        if (peek() == '+') {
            ++pos_;
            return unary();
        }
        if (peek() == '-') {
            ++pos_;
            Lin v = unary();
            return Lin{-v.a, -v.b};
        }
        return primary();
    }

    Lin primary() {
        skip();
        char c = peek();
        if (c == '(') {
            ++pos_;
            Lin v = expr();
            skip();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (ident_start(c)) {
            size_t at = pos_;
            std::string name = ident();
            if (name == eps_) return Lin{QG(), QG(1)};
            if (name == "I") return Lin{QG(Q(0), Q(1)), QG()};
            fail("unknown symbol '" + name + "'", at);
        }
        if (c == '\0') fail("unexpected end of input");
        fail(std::string("unexpected character '") + c + "'");
    }

    Lin number() {
        size_t b = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        // exponent only when digits follow, so "2e" stays an error rather than eating a symbol
        if ((peek() == 'e' || peek() == 'E') && pos_ + 1 < s_.size()) {
            size_t q = pos_ + 1;
            if (s_[q] == '+' || s_[q] == '-') ++q;
            if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                pos_ = q;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        auto q = parse_rational(s_.substr(b, pos_ - b));
        if (!q) fail("malformed number", b);
        if (ident_start(peek())) fail("expected an operator between a number and a symbol (write 2*" + eps_ + ")");
        return Lin{QG(*q), QG()};
    }
};

struct Shape {
    Family family;
    int n;  // 0: taken from the argument group
    // group sizes in units of n (0 means a single value)
    std::vector<int> groups;
    const char* usage;
};

std::optional<Shape> shape_of(const std::string& head) {
    if (head == "Hypergeometric2F1") return Shape{Family::FD, 1, {0, 1, 0, 1}, "Hypergeometric2F1[a, b, c, z]"};
    if (head == "AppellF1") return Shape{Family::FD, 2, {0, 1, 0, 1}, "AppellF1[a, b1, b2, c, x, y]"};
    if (head == "AppellF2") return Shape{Family::FA, 2, {0, 1, 1, 1}, "AppellF2[a, b1, b2, c1, c2, x, y]"};
    if (head == "AppellF3") return Shape{Family::FB, 2, {1, 1, 0, 1}, "AppellF3[a1, a2, b1, b2, c, x, y]"};
    if (head == "LauricellaFA") return Shape{Family::FA, 0, {0, 1, 1, 1}, "LauricellaFA[a, {b..}, {c..}, {x..}]"};
    if (head == "LauricellaFB") return Shape{Family::FB, 0, {1, 1, 0, 1}, "LauricellaFB[{a..}, {b..}, c, {x..}]"};
    if (head == "LauricellaFD") return Shape{Family::FD, 0, {0, 1, 0, 1}, "LauricellaFD[a, {b..}, c, {x..}]"};
    return std::nullopt;
}

std::string fmt_err(long double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3Le", e);
    return buf;
}

}  // namespace

FunctionSpec parse_expression(const std::string& text, const std::string& eps_symbol) {
    if (eps_symbol.empty() || eps_symbol == "I" || !std::isalpha(static_cast<unsigned char>(eps_symbol[0])))
        throw Error(ErrorCode::usage, "invalid epsilon symbol", "'" + eps_symbol + "'");
    Parser p(text, eps_symbol);
    std::vector<Item> items = p.call();
    auto shape = shape_of(p.head);
    if (!shape) p.fail("unknown function '" + p.head + "'", p.head_col);

    int n = shape->n;
    if (n == 0) {
        const Item& last = items.back();
        n = last.list ? static_cast<int>(last.values.size()) : 1;
        if (n < 1 || n > 3)
            throw Error(ErrorCode::usage, "arity mismatch", p.head + " supports 1 to 3 variables, got " + std::to_string(n));
    }

    // Consume items group by group: a list of the full size, or that many scalars.
    std::vector<std::vector<Lin>> groups;
    std::vector<size_t> group_col;
    size_t k = 0;
    for (int g : shape->groups) {
        size_t want = g == 0 ? 1 : static_cast<size_t>(n);
        std::vector<Lin> vals;
        if (k >= items.size())
            throw Error(ErrorCode::usage, "arity mismatch", "too few arguments; expected " + std::string(shape->usage));
        group_col.push_back(items[k].col);
        if (items[k].list) {
            if (items[k].values.size() != want)
                throw Error(ErrorCode::usage, "arity mismatch",
                            "column " + std::to_string(items[k].col + 1) + ": list of " +
                                std::to_string(items[k].values.size()) + " where " + std::to_string(want) +
                                " values are expected; usage " + shape->usage);
            vals = items[k++].values;
        } else {
            for (size_t j = 0; j < want; ++j) {
                if (k >= items.size() || items[k].list)
                    throw Error(ErrorCode::usage, "arity mismatch", "expected " + std::string(shape->usage));
                vals.push_back(items[k++].values[0]);
            }
        }
        groups.push_back(std::move(vals));
    }
    if (k != items.size())
        throw Error(ErrorCode::usage, "arity mismatch", "too many arguments; expected " + std::string(shape->usage));

    auto params = [&](size_t gi) {
        std::vector<LinearForm> out;
        for (const Lin& v : groups[gi]) {
            if (sgn(v.a.im) != 0 || sgn(v.b.im) != 0)
                throw Error(ErrorCode::usage, "invalid function specification",
                            "column " + std::to_string(group_col[gi] + 1) + ": parameters must be real");
            out.push_back(LinearForm(v.a.re, v.b.re));
        }
        return out;
    };
    FunctionSpec s;
    s.family = shape->family;
    s.n = n;
    s.alpha = params(0);
    s.beta = params(1);
    s.gamma = params(2);
    for (const Lin& v : groups[3]) {
        if (!v.constant())
            throw Error(ErrorCode::usage, "invalid function specification",
                        "column " + std::to_string(group_col[3] + 1) + ": arguments must not depend on " + eps_symbol);
        s.args.push_back(v.a);
    }
    s.validate();
    return s;
}

std::string print_expression(const FunctionSpec& spec, const std::string& eps_symbol) {
    return spec.to_string(eps_symbol);
}

nlohmann::ordered_json output_record(const std::string& expression, const EvalRequest& req, const LaurentResult& r,
                                     bool with_timing) {
    using json = nlohmann::ordered_json;
    const Options& o = req.options;
    json request = {
        {"expression", expression},
        {"canonical", print_expression(req.spec)},
        {"family", family_name(req.spec.family)},
        {"n", req.spec.n},
        {"order", req.order},
        {"precision", req.digits},
        {"pole_order", req.pole_order},
        {"options",
         {{"simple_continuation", o.simple_continuation},
          {"frobenius_terms", o.frobenius_terms > 0 ? json(o.frobenius_terms) : json("auto")},
          {"internal_precision", o.internal_precision > 0 ? json(o.internal_precision) : json("auto")},
          {"delta_prescription", o.delta_sign > 0 ? "+i" : "-i"}}},
    };
    json coeffs = json::array();
    for (size_t m = 0; m < r.coefficients.size(); ++m) {
        coeffs.push_back({{"power", static_cast<int>(m) - r.pole_order},
                          {"re", r.coefficients[m].re.to_string(req.digits)},
                          {"im", r.coefficients[m].im.to_string(req.digits)},
                          {"error", fmt_err(r.errors[m])}});
        if (m < r.drift.size()) coeffs.back()["drift"] = fmt_err(r.drift[m]);
    }
    json nodes = json::array();
    for (const NodeDiag& nd : r.nodes) {
        json j = {{"eps", q_to_string(nd.eps)},
                  {"legs", nd.legs},
                  {"hops", nd.hops},
                  {"max_terms", nd.max_terms},
                  {"error", fmt_err(nd.error)}};
        if (with_timing) j["seconds"] = nd.seconds;
        nodes.push_back(std::move(j));
    }
    json diag = {
        {"strategy", strategy_name(r.strategy)},
        {"lattice", {{"step_exponent", r.lattice.e}, {"half_count", r.lattice.half_count}, {"nodes", r.lattice.nodes.size()}}},
        {"working_digits", r.d_work},
        {"reruns", r.reruns},
        {"warnings", r.warnings},
        {"nodes", nodes},
    };
    return {{"schema_version", kSchemaVersion},
            {"request", request},
            {"result", {{"pole_order", r.pole_order}, {"coefficients", coeffs}, {"error_estimate", fmt_err(r.estimate)}}},
            {"diagnostics", diag}};
}

nlohmann::ordered_json error_record(const std::string& code, const std::string& kind, const std::string& message) {
    return {{"schema_version", kSchemaVersion}, {"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
}

std::string text_report(const EvalRequest& req, const LaurentResult& r, const std::string& eps_symbol) {
    std::ostringstream os;
    os << print_expression(req.spec, eps_symbol) << "\n";
    os << "order " << req.order << ", precision " << req.digits << ", pole order " << req.pole_order << ", strategy "
       << strategy_name(r.strategy) << ", working digits " << r.d_work << "\n";
    std::vector<std::string> label, re, im;
    size_t wl = 0, wr = 0;
    for (size_t m = 0; m < r.coefficients.size(); ++m) {
        label.push_back(eps_symbol + "^" + std::to_string(static_cast<int>(m) - r.pole_order));
        re.push_back(r.coefficients[m].re.to_string(req.digits));
        im.push_back(r.coefficients[m].im.to_string(req.digits));
        wl = std::max(wl, label.back().size());
        wr = std::max(wr, re.back().size());
    }
    for (size_t m = 0; m < label.size(); ++m) {
        os << label[m] << std::string(wl - label[m].size() + 2, ' ') << re[m] << std::string(wr - re[m].size() + 2, ' ')
           << (im[m][0] == '-' ? "" : "+") << im[m] << "*I   +- " << fmt_err(r.errors[m]) << "\n";
    }
    os << "error estimate " << fmt_err(r.estimate) << "\n";
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    return os.str();
}

const std::vector<BenchEntry>& bench_suite() {
    static const std::vector<BenchEntry> suite = {
        {"F1", "AppellF1[1/2, 1, ep, 3/2, 4/3, 7/4]"},
        {"F2", "AppellF2[1, 2/3*ep, 1, 1+3/2*ep, 1-15/7*ep, 3/2, 4]"},
        {"FD3", "LauricellaFD[1/2-ep, {1, ep, ep}, 1+2*ep, {4/3, 3/4, 8/5}]"},
    };
    return suite;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "function,order,precision,seconds,nodes,hops,max_terms\n";
    for (const auto& r : rows) {
        char t[32];
        std::snprintf(t, sizeof t, "%.4f", r.seconds);
        os << r.name << "," << r.order << "," << r.digits << "," << t << "," << r.nodes << "," << r.hops << ","
           << r.max_terms << "\n";
    }
    return os.str();
}

double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y, double* slope) {
    size_t m = x.size();
    if (m < 2 || y.size() != m) return 0;
    double mx = 0, my = 0;
    for (size_t i = 0; i < m; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (slope) *slope = sxx > 0 ? sxy / sxx : 0;
    if (sxx <= 0 || syy <= 0) return syy <= 0 ? 1 : 0;
    return sxy * sxy / (sxx * syy);
}

}  // namespace lauricella
