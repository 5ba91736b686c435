#pragma once

#include "qpmix/dataset.hpp"
#include "qpmix/stats.hpp"

#include <span>
#include <string_view>

namespace qpmix {

enum class TestKind { Exact, Asymptotic };

TestKind parse_test_kind(std::string_view name);
std::string_view to_string(TestKind kind);

struct TestResult {
    double statistic = 1.0;  // Lambda
    double p_asymptotic = 1.0;
    double p_exact = 1.0;
    double df = 1.0;
    double beta_a = 0.0;
    double beta_b = 0.0;
    int effective_levels = 1;  // observed joint levels |I|
    bool reject = false;

    double p_value(TestKind kind) const { return kind == TestKind::Exact ? p_exact : p_asymptotic; }
};

/// P(B <= lambda) for B ~ Beta(a, b): small Lambda is evidence against H0.
double beta_lower_tail(double lambda, double a, double b);

/// Exact p-value of a missing continuous edge: Lambda ~ Beta((n-|G|-|I|+1)/2, 1/2).
/// Throws SampleSizeError when the first shape parameter is not positive.
double exact_test_continuous(double lambda, int n, int n_cont, int n_levels);

/// Exact p-value of a missing mixed edge:
/// Lambda ~ Beta((n-|G|-|I|+1)/2, |I_rest| (|I_delta|-1)/2).
double exact_test_mixed(double lambda, int n, int n_cont, int n_levels, int levels_delta, int levels_rest);

/// Chi-square approximation: -n log Lambda ~ chi2_df.
double asymptotic_test(double lambda, int n, double df);

/// Conditional independence test of a and b given q. Dispatches on the marks
/// of (a, b) and decides with the p-value of `kind` at level alpha.
/// Infeasible tests surface as InfeasibleTestError subclasses.
TestResult ci_test(const MixedDataset& d, Vertex a, Vertex b, std::span<const Vertex> q, double alpha,
                   TestKind kind = TestKind::Exact);

}  // namespace qpmix
