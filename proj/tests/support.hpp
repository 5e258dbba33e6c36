#pragma once

#include <map>
#include <random>

#include "lauricella/model.hpp"
#include "lauricella/pfaffian.hpp"

namespace lauricella::testing {

inline long double rel_diff(const Complex& a, const Complex& b) { return mag(a - b) / std::max(1.0L, mag(b)); }

inline long double max_rel_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    long double m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, rel_diff(a[i], b[i]));
    return m;
}

inline Q rq(std::mt19937_64& g, int num, int den) {
    std::uniform_int_distribution<int> n(-num, num), d(1, den);
    Q q(n(g), d(g));
    q.canonicalize();
    return q;
}

// Non-integer value, so no Pochhammer denominator vanishes.
inline Q rparam(std::mt19937_64& g) {
    for (;;) {
        Q q = rq(g, 30, 7);
        if (q.get_den() != 1) return q;
    }
}

inline const PfaffianSystem& symbolic_system(Family f, int n) {
    static std::map<std::pair<int, int>, PfaffianSystem> memo;
    auto key = std::make_pair(static_cast<int>(f), n);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, derive_pfaffian(f, n)).first;
    return it->second;
}

inline PfaffianSystem node_system(const FunctionSpec& s, const Q& eps) {
    return substitute(symbolic_system(s.family, s.n), NodeParams::at(s, eps));
}

inline FunctionSpec gauss(Q a, Q b, Q c, QG z) {
    FunctionSpec s;
    s.family = Family::FD;
    s.n = 1;
    s.alpha = {LinearForm(a)};
    s.beta = {LinearForm(b)};
    s.gamma = {LinearForm(c)};
    s.args = {z};
    return s;
}

}  // namespace lauricella::testing
