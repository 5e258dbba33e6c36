#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lauricella/epsilon.hpp"

namespace lauricella {

// Bracket-call grammar, e.g.
//   LauricellaFD[1/2-ep, {1, ep, ep}, 1+2*ep, {4/3, 3/4, 8/5}]
//   AppellF2[1, 2/3*ep, 1, 1+3/2*ep, 1-15/7*ep, 3/2, 4]
// Parentheses work in place of brackets. Groups of n values may be written
// as a {list} or as n consecutive scalars. Throws Error(usage) with the
// column of the offending token.
FunctionSpec parse_expression(const std::string& text, const std::string& eps_symbol = "ep");

// Canonical Lauricella form; parse_expression reads it back to the same spec.
std::string print_expression(const FunctionSpec& spec, const std::string& eps_symbol = "ep");

constexpr int kSchemaVersion = 1;

// Timing fields are left out when with_timing is false, so two runs of the
// same request give identical bytes.
nlohmann::ordered_json output_record(const std::string& expression, const EvalRequest& req, const LaurentResult& r,
                                     bool with_timing = true);
nlohmann::ordered_json error_record(const std::string& code, const std::string& kind, const std::string& message);

// Aligned plain text for --format text.
std::string text_report(const EvalRequest& req, const LaurentResult& r, const std::string& eps_symbol = "ep");

// Built-in benchmark functions: the paper's three examples.
struct BenchEntry {
    std::string name;
    std::string expression;
};
const std::vector<BenchEntry>& bench_suite();

struct BenchRow {
    std::string name;
    int order = 0;
    int digits = 0;
    double seconds = 0;  // mean over repeats
    int nodes = 0;
    int hops = 0;        // summed over nodes
    int max_terms = 0;
};
std::string bench_csv(const std::vector<BenchRow>& rows);

// Least-squares line through (x, y); returns R^2.
double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y, double* slope = nullptr);

}  // namespace lauricella
