#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lauricella/cli.hpp"
#include "lauricella/error.hpp"
#include "lauricella/pfaffian.hpp"

using namespace lauricella;
using nlohmann::json;

namespace {

int parse_auto(const std::string& flag, const std::string& v) {
    if (v == "auto") return 0;
    try {
        size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos == v.size() && x > 0) return x;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::usage, "invalid option value", flag + " expects auto or a positive integer, got '" + v + "'");
}

// "1-8", "1,2,5" or "3"
std::vector<int> parse_int_list(const std::string& flag, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string part;
    auto num = [&](const std::string& t) {
        size_t pos = 0;
        int x = 0;
        try {
            x = std::stoi(t, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != t.size() || x < 1)
            throw Error(ErrorCode::usage, "invalid option value", flag + ": '" + v + "'");
        return x;
    };
    while (std::getline(ss, part, ',')) {
        size_t dash = part.find('-');
        if (dash == std::string::npos) {
            out.push_back(num(part));
        } else {
            int a = num(part.substr(0, dash)), b = num(part.substr(dash + 1));
            if (b < a) throw Error(ErrorCode::usage, "invalid option value", flag + ": '" + v + "'");
            for (int x = a; x <= b; ++x) out.push_back(x);
        }
    }
    return out;
}

int fail(const Error& e, bool json_out) {
    if (json_out) std::cout << error_record(code_name(e.code()), e.kind(), e.what()).dump(2) << "\n";
    std::cerr << "error [" << code_name(e.code()) << "] " << e.what() << "\n";
    return static_cast<int>(e.code());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laurent expansion in eps of Gauss, Appell and Lauricella functions"};
    app.require_subcommand(0, 1);

    std::string expression, eps_symbol = "ep", frob = "auto", internal = "auto", delta = "-i", format = "json";
    std::string cache_dir, geometry_file;
    EvalRequest req;
    bool simple = false;
    int threads = 0;
    app.add_option("expression", expression, "e.g. 'AppellF1[1/2, 1, ep, 3/2, 4/3, 7/4]'; '-' reads stdin");
    app.add_option("--order,-k", req.order, "number of Laurent coefficients")->check(CLI::PositiveNumber);
    app.add_option("--precision,-d", req.digits, "decimal digits")->check(CLI::PositiveNumber);
    app.add_option("--pole-order,-p", req.pole_order, "assumed pole order at eps = 0")->check(CLI::NonNegativeNumber);
    app.add_flag("--simple-continuation", simple, "one straight leg, no coordinate-wise splitting");
    app.add_option("--threads", threads, "worker threads, 0 = all")->check(CLI::NonNegativeNumber);
    app.add_option("--frobenius-terms", frob, "auto or a fixed truncation order");
    app.add_option("--internal-precision", internal, "auto or working digits");
    app.add_option("--delta-prescription", delta, "+i or -i: side of a cut for endpoints on it")
        ->check(CLI::IsMember({"+i", "-i"}));
    app.add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--epsilon-symbol", eps_symbol, "name of eps in the expression");
    app.add_option("--cache-dir", cache_dir, "directory for derived Pfaffian systems");
    app.add_option("--dump-path-geometry", geometry_file, "write the continuation path of the first node as JSON");

    CLI::App* bench = app.add_subcommand("bench", "time the built-in benchmark functions");
    std::string select, orders = "3", precisions = "30", bench_format = "csv";
    std::vector<std::string> extra;
    int repeat = 1;
    bench->add_option("--select", select, "only functions whose name contains this text");
    bench->add_option("--expr", extra, "add an expression to the suite (repeatable)");
    bench->add_option("--orders", orders, "orders k, e.g. 1-8 or 1,3");
    bench->add_option("--precisions", precisions, "digits d, e.g. 30,60");
    bench->add_option("--repeat", repeat, "runs per row")->check(CLI::PositiveNumber);
    bench->add_option("--threads", threads, "worker threads, 0 = all")->check(CLI::NonNegativeNumber);
    bench->add_option("--cache-dir", cache_dir, "directory for derived Pfaffian systems");
    bench->add_option("--format", bench_format, "csv or text")->check(CLI::IsMember({"csv", "text"}));

    CLI::App* cache = app.add_subcommand("cache", "derive every Pfaffian system into the cache directory");
    cache->add_option("--cache-dir", cache_dir, "cache directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error [usage] " << e.what() << "\n";
        return static_cast<int>(ErrorCode::usage);
    }

    bool json_out = format == "json" && !bench->parsed() && !cache->parsed();
    try {
        if (cache->parsed()) {
            std::filesystem::create_directories(cache_dir);
            for (Family f : {Family::FA, Family::FB, Family::FD})
                for (int n = 1; n <= 3; ++n) {
                    load_or_derive(f, n, cache_dir);
                    std::cout << family_name(f) << n << "\n";
                }
            return 0;
        }

        if (bench->parsed()) {
            std::vector<BenchEntry> suite;
            for (const auto& b : bench_suite())
                if (b.name.find(select) != std::string::npos) suite.push_back(b);
            for (size_t i = 0; i < extra.size(); ++i) suite.push_back({"expr" + std::to_string(i + 1), extra[i]});
            auto ks = parse_int_list("--orders", orders), ds = parse_int_list("--precisions", precisions);
            std::vector<BenchRow> rows;
            for (const auto& b : suite) {
                EvalRequest r;
                r.spec = parse_expression(b.expression);
                r.options.threads = threads;
                for (int d : ds)
                    for (int k : ks) {
                        r.order = k;
                        r.digits = d;
                        BenchRow row;
                        row.name = b.name;
                        row.order = k;
                        row.digits = d;
                        for (int rep = 0; rep < repeat; ++rep) {
                            auto t0 = std::chrono::steady_clock::now();
                            LaurentResult res = evaluate(r, cache_dir);
                            row.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                            row.nodes = static_cast<int>(res.nodes.size());
                            row.hops = 0;
                            row.max_terms = 0;
                            for (const auto& nd : res.nodes) {
                                row.hops += nd.hops;
                                row.max_terms = std::max(row.max_terms, nd.max_terms);
                            }
                        }
                        row.seconds /= repeat;
                        rows.push_back(row);
                    }
            }
            if (bench_format == "csv") {
                std::cout << bench_csv(rows);
                return 0;
            }
            std::printf("%-8s %5s %9s %10s %6s %6s %9s\n", "function", "order", "precision", "seconds", "nodes", "hops",
                        "max_terms");
            for (const auto& r : rows)
                std::printf("%-8s %5d %9d %10.4f %6d %6d %9d\n", r.name.c_str(), r.order, r.digits, r.seconds, r.nodes,
                            r.hops, r.max_terms);
            // time against order, per function and precision
            std::map<std::pair<std::string, int>, std::pair<std::vector<double>, std::vector<double>>> series;
            for (const auto& r : rows) {
                auto& s = series[{r.name, r.digits}];
                s.first.push_back(r.order);
                s.second.push_back(r.seconds);
            }
            for (const auto& [key, s] : series) {
                if (s.first.size() < 3) continue;
                double slope = 0, r2 = linear_fit_r2(s.first, s.second, &slope);
                std::printf("%s d=%d: %.4f s per order, R^2 = %.4f\n", key.first.c_str(), key.second, slope, r2);
            }
            return 0;
        }

        if (expression.empty()) throw Error(ErrorCode::usage, "missing expression", "run with --help for usage");
        if (expression == "-") {
            expression.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
            while (!expression.empty() && std::isspace(static_cast<unsigned char>(expression.back()))) expression.pop_back();
        }
        req.spec = parse_expression(expression, eps_symbol);
        req.options.simple_continuation = simple;
        req.options.threads = threads;
        req.options.frobenius_terms = parse_auto("--frobenius-terms", frob);
        req.options.internal_precision = parse_auto("--internal-precision", internal);
        req.options.delta_sign = delta == "+i" ? 1 : -1;

        LaurentResult r = evaluate(req, cache_dir, !geometry_file.empty());
        if (!geometry_file.empty()) {
            json legs = json::array();
            for (const auto& g : r.geometry) legs.push_back(json::parse(g));
            std::ofstream out(geometry_file);
            if (!out) throw Error(ErrorCode::usage, "cannot write file", geometry_file);
            out << json{{"legs", legs}}.dump(2) << "\n";
        }
        if (format == "json")
            std::cout << output_record(expression, req, r).dump(2) << "\n";
        else
            std::cout << text_report(req, r, eps_symbol);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        return 0;
    } catch (const Error& e) {
        return fail(e, json_out);
    } catch (const std::exception& e) {
        return fail(Error(ErrorCode::internal, "internal error", e.what()), json_out);
    }
}
