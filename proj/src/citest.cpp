#include "qpmix/citest.hpp"

#include "qpmix/errors.hpp"
#include "qpmix/special_functions.hpp"

#include <cmath>
#include <string>

namespace qpmix {

TestKind parse_test_kind(std::string_view name) {
    if (name == "exact") return TestKind::Exact;
    if (name == "asymptotic") return TestKind::Asymptotic;
    throw ConfigError("unknown test '" + std::string(name) + "' (expected exact or asymptotic)");
}

std::string_view to_string(TestKind kind) { return kind == TestKind::Exact ? "exact" : "asymptotic"; }

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("likelihood ratio must lie in (0, 1]");
}

double first_shape(int n, int n_cont, int n_levels) {
    const double a = (n - n_cont - n_levels + 1) / 2.0;
    if (!(a > 0.0))
        throw SampleSizeError("n=" + std::to_string(n) + " too small for |Gamma|=" + std::to_string(n_cont) +
                              " and |I|=" + std::to_string(n_levels));
    return a;
}

}  // namespace

double beta_lower_tail(double lambda, double a, double b) {
    check_lambda(lambda);
    return reg_inc_beta(a, b, lambda);
}

double exact_test_continuous(double lambda, int n, int n_cont, int n_levels) {
    return beta_lower_tail(lambda, first_shape(n, n_cont, n_levels), 0.5);
}

double exact_test_mixed(double lambda, int n, int n_cont, int n_levels, int levels_delta, int levels_rest) {
    const double a = first_shape(n, n_cont, n_levels);
    const double b = levels_rest * (levels_delta - 1) / 2.0;
    if (!(b > 0.0)) throw EmptyCellError("discrete endpoint has a single observed level");
    return beta_lower_tail(lambda, a, b);
}

double asymptotic_test(double lambda, int n, double df) {
    check_lambda(lambda);
    if (!(df > 0.0)) throw DomainError("degrees of freedom must be positive");
    return chi_square_sf(-static_cast<double>(n) * std::log(lambda), df);
}

TestResult ci_test(const MixedDataset& d, Vertex a, Vertex b, std::span<const Vertex> q, double alpha,
                   TestKind kind) {
    if (a < 0 || b < 0 || a >= d.p() || b >= d.p()) throw ConfigError("vertex index out of range");
    if (d.is_discrete(a) && d.is_discrete(b))
        throw DiscretePairError("pairs of discrete variables are assumed marginally independent and not tested");
    TestResult r;
    if (!d.is_discrete(a) && !d.is_discrete(b)) {
        const LrStatistic lr = lr_continuous(d, a, b, q);
        r.statistic = lr.lambda;
        r.effective_levels = lr.observed_cells;
        r.df = 1.0;
        r.beta_a = first_shape(lr.n, lr.n_continuous, lr.observed_cells);
        r.beta_b = 0.5;
    } else {
        const Vertex delta = d.is_discrete(a) ? a : b;
        const Vertex gamma = d.is_discrete(a) ? b : a;
        const LrStatistic lr = lr_mixed(d, delta, gamma, q);
        r.statistic = lr.lambda;
        r.effective_levels = lr.observed_cells;
        // Intercepts lost under H0, counted over observed cells; equals
        // |I_rest| (|I_delta| - 1) when every joint level is observed.
        const int contrast = lr.observed_cells - lr.observed_rest;
        if (contrast <= 0) throw EmptyCellError("discrete endpoint has a single observed level within every cell");
        r.df = contrast;
        r.beta_a = first_shape(lr.n, lr.n_continuous, lr.observed_cells);
        r.beta_b = contrast / 2.0;
    }
    r.p_exact = beta_lower_tail(r.statistic, r.beta_a, r.beta_b);
    r.p_asymptotic = asymptotic_test(r.statistic, d.n(), r.df);
    r.reject = r.p_value(kind) < alpha;
    return r;
}

}  // namespace qpmix
