#include "causim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "causim/error.hpp"
#include "causim/stats.hpp"

namespace causim {

std::size_t FitResult::index_of(std::string_view term) const {
    const auto it = std::find(terms.begin(), terms.end(), term);
    if (it == terms.end()) throw MissingColumnError("fit has no term '" + std::string(term) + "'");
    return static_cast<std::size_t>(it - terms.begin());
}

double FitResult::linear_predictor(std::span<const double> x) const {
    if (x.size() + 1 != coefficients.size()) {
        throw InvalidArgumentError("expected " + std::to_string(coefficients.size() - 1) + " regressor values");
    }
    double eta = coefficients[0];
    for (std::size_t k = 0; k < x.size(); ++k) eta += coefficients[k + 1] * x[k];
    return eta;
}

double FitResult::predict(std::span<const double> x) const {
    const double eta = linear_predictor(x);
    return model == Model::logistic ? stats::sigmoid(eta) : eta;
}

std::vector<double> FitResult::predict(const Dataset& data) const {
    const std::vector<std::string> regressors(terms.begin() + 1, terms.end());
    std::vector<std::span<const double>> cols;
    for (const auto& r : regressors) {
        if (!data.has_column(r)) throw MissingFeatureError("dataset lacks regressor '" + r + "'");
        cols.push_back(data.column(r));
    }
    std::vector<double> out(data.n_rows());
    std::vector<double> x(regressors.size());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t k = 0; k < cols.size(); ++k) x[k] = cols[k][i];
        out[i] = predict(x);
    }
    return out;
}

namespace {

Eigen::MatrixXd design_matrix(const Dataset& data, const std::vector<std::string>& regressors) {
    const auto n = static_cast<Eigen::Index>(data.n_rows());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(regressors.size()) + 1);
    x.col(0).setOnes();
    for (std::size_t k = 0; k < regressors.size(); ++k) {
        const auto col = data.column(regressors[k]);
        x.col(static_cast<Eigen::Index>(k) + 1) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
    }
    return x;
}

Eigen::VectorXd target_vector(const Dataset& data, std::string_view target) {
    const auto col = data.column(target);
    return Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()));
}

void check_regressors(std::string_view target, const std::vector<std::string>& regressors) {
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        if (regressors[i] == target) throw InvalidArgumentError("target '" + regressors[i] + "' used as regressor");
        for (std::size_t j = 0; j < i; ++j) {
            if (regressors[i] == regressors[j]) {
                throw RankDeficientError("regressor '" + regressors[i] + "' listed twice");
            }
        }
    }
}

std::vector<std::string> term_names(const std::vector<std::string>& regressors) {
    std::vector<std::string> t{"intercept"};
    t.insert(t.end(), regressors.begin(), regressors.end());
    return t;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

FitResult ols_fit(const Dataset& data, std::string_view target, const std::vector<std::string>& regressors) {
    check_regressors(target, regressors);
    const std::size_t n = data.n_rows();
    const std::size_t p = regressors.size() + 1;
    if (n <= p) {
        throw InsufficientDataError(fmt::format("OLS needs more than {} rows, got {}", p, n));
    }
    const Eigen::MatrixXd x = design_matrix(data, regressors);
    const Eigen::VectorXd y = target_vector(data, target);

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const auto pi = static_cast<Eigen::Index>(p);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(pi, pi).triangularView<Eigen::Upper>();
    // Singular values of X equal those of R.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(pi - 1) < kRankTolerance * sv(0)) {
        throw RankDeficientError(fmt::format("design matrix is rank deficient (condition {:.3g})",
                                             sv(0) / sv(pi - 1)));
    }

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * beta;
    const double rss = resid.squaredNorm();
    const double df = static_cast<double>(n - p);
    const double sigma2 = rss / df;

    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(pi, pi));
    const Eigen::VectorXd var_diag = (r_inv * r_inv.transpose()).diagonal() * sigma2;

    FitResult fit;
    fit.model = FitResult::Model::ols;
    fit.target = std::string(target);
    fit.terms = term_names(regressors);
    fit.coefficients = to_std(beta);
    fit.n_used = n;
    fit.residual_variance = sigma2;
    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();
    fit.r_squared = sst > 0.0 ? 1.0 - rss / sst : 1.0;
    for (Eigen::Index k = 0; k < pi; ++k) {
        const double se = std::sqrt(std::max(var_diag(k), 0.0));
        fit.std_errors.push_back(se);
        double t;
        if (se > 0.0) {
            t = beta(k) / se;
        } else {
            t = beta(k) == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), beta(k));
        }
        fit.statistics.push_back(t);
        fit.p_values.push_back(stats::student_t_two_sided_p(t, df));
    }
    return fit;
}

CorrResult pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgumentError("pearson needs equal-length columns");
    const std::size_t n = a.size();
    if (n < 3) throw InsufficientDataError("pearson needs at least 3 rows");
    const double ma = stats::mean(a);
    const double mb = stats::mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw DegenerateColumnError("pearson of a constant column");
    CorrResult c;
    c.n = n;
    c.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    if (std::fabs(c.r) == 1.0) {
        c.p = 0.0;
    } else {
        c.p = stats::student_t_two_sided_p(c.r * std::sqrt(df / (1.0 - c.r * c.r)), df);
    }
    return c;
}

CorrResult pearson(const Dataset& data, std::string_view a, std::string_view b) {
    auto c = pearson(data.column(a), data.column(b));
    c.a = std::string(a);
    c.b = std::string(b);
    return c;
}

namespace {

double log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    // sum y*eta - log(1 + exp(eta)), evaluated stably.
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double e = eta(i);
        const double softplus = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        ll += y(i) * e - softplus;
    }
    return ll;
}

}  // namespace

FitResult logistic_fit(const Dataset& data, std::string_view target,
                       const std::vector<std::string>& regressors, const LogisticOptions& options) {
    check_regressors(target, regressors);
    const std::size_t n = data.n_rows();
    const std::size_t p = regressors.size() + 1;
    if (n <= p) throw InsufficientDataError(fmt::format("logistic fit needs more than {} rows", p));

    const Eigen::VectorXd y = target_vector(data, target);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) {
            throw NonBinaryTargetError(fmt::format("target '{}' has non-binary value {}", target, y(i)));
        }
    }
    const double ybar = y.mean();
    if (ybar == 0.0 || ybar == 1.0) {
        throw SeparationError("target is constant; the intercept diverges");
    }

    const Eigen::MatrixXd x = design_matrix(data, regressors);
    {
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
        const auto pi = static_cast<Eigen::Index>(p);
        const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(pi, pi).triangularView<Eigen::Upper>();
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
        const auto& sv = svd.singularValues();
        if (!(sv(0) > 0.0) || sv(pi - 1) < kRankTolerance * sv(0)) {
            throw RankDeficientError("design matrix is rank deficient");
        }
    }

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    theta(0) = std::log(ybar / (1.0 - ybar));
    Eigen::VectorXd eta = x * theta;
    double ll = log_likelihood(eta, y);

    constexpr double kDivergenceBound = 50.0;
    Eigen::VectorXd prob(y.size());
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    std::size_t iter = 0;
    bool converged = false;
    for (; iter <= options.max_iterations; ++iter) {
        for (Eigen::Index i = 0; i < eta.size(); ++i) prob(i) = stats::sigmoid(eta(i));
        grad = x.transpose() * (y - prob);
        const Eigen::VectorXd w = (prob.array() * (1.0 - prob.array())).matrix();
        hess = x.transpose() * w.asDiagonal() * x;
        if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            converged = true;
            break;
        }
        if (iter == options.max_iterations) break;

        const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
        const Eigen::VectorXd step = ldlt.solve(grad);

        // Step halving; changes within rounding of the log-likelihood count
        // as no decrease so the final Newton steps are never rejected.
        const double slack = 1e-12 * (1.0 + std::fabs(ll));
        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
            const Eigen::VectorXd cand = theta + scale * step;
            const Eigen::VectorXd cand_eta = x * cand;
            const double cand_ll = log_likelihood(cand_eta, y);
            if (cand_ll >= ll - slack) {
                theta = cand;
                eta = cand_eta;
                ll = cand_ll;
                accepted = true;
                break;
            }
        }
        if (theta.lpNorm<Eigen::Infinity>() > kDivergenceBound * (1.0 + x.lpNorm<Eigen::Infinity>())) {
            throw SeparationError("coefficients diverge; the classes are (quasi-)separable");
        }
        if (!accepted) break;
    }
    if (!converged) {
        // Probabilities pinned at the labels mean the optimum is at infinity.
        if (ll > -1e-6 * static_cast<double>(n)) {
            throw SeparationError("fitted probabilities reach 0/1; the classes are separable");
        }
        throw SeparationError(fmt::format("Newton iterations did not converge (gradient {:.3g})",
                                          grad.lpNorm<Eigen::Infinity>()));
    }

    const Eigen::MatrixXd cov = hess.ldlt().solve(Eigen::MatrixXd::Identity(hess.rows(), hess.cols()));
    FitResult fit;
    fit.model = FitResult::Model::logistic;
    fit.target = std::string(target);
    fit.terms = term_names(regressors);
    fit.coefficients = to_std(theta);
    fit.n_used = n;
    fit.log_likelihood = ll;
    fit.iterations = iter;
    fit.residual_variance = (y - prob).squaredNorm() / static_cast<double>(n - p);
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const double se = std::sqrt(std::max(cov(k, k), 0.0));
        const double z = se > 0.0 ? theta(k) / se : 0.0;
        fit.std_errors.push_back(se);
        fit.statistics.push_back(z);
        fit.p_values.push_back(stats::normal_two_sided_p(z));
    }
    return fit;
}

void write_fit_csv_header(std::ostream& out) {
    out << "model,target,term,estimate,std_error,statistic,p_value,residual_variance,n_used\n";
}

void write_fit_csv_rows(std::ostream& out, const FitResult& fit) {
    const char* model = fit.model == FitResult::Model::ols ? "ols" : "logistic";
    for (std::size_t k = 0; k < fit.terms.size(); ++k) {
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", model, fit.target, fit.terms[k],
                           fit.coefficients[k], fit.std_errors[k], fit.statistics[k], fit.p_values[k],
                           fit.residual_variance, fit.n_used);
    }
}

void write_corr_csv_header(std::ostream& out) { out << "a,b,r,p,n\n"; }

void write_corr_csv_row(std::ostream& out, const CorrResult& c) {
    out << fmt::format("{},{},{},{},{}\n", c.a, c.b, c.r, c.p, c.n);
}

nlohmann::ordered_json fit_to_json(const FitResult& fit) {
    nlohmann::ordered_json j;
    j["model"] = fit.model == FitResult::Model::ols ? "ols" : "logistic";
    j["target"] = fit.target;
    j["terms"] = fit.terms;
    j["estimates"] = fit.coefficients;
    j["std_errors"] = fit.std_errors;
    j["statistics"] = fit.statistics;
    j["p_values"] = fit.p_values;
    j["residual_variance"] = fit.residual_variance;
    j["n_used"] = fit.n_used;
    if (fit.model == FitResult::Model::ols) {
        j["r_squared"] = fit.r_squared;
    } else {
        j["log_likelihood"] = fit.log_likelihood;
        j["iterations"] = fit.iterations;
    }
    return j;
}

nlohmann::ordered_json corr_to_json(const CorrResult& c) {
    nlohmann::ordered_json j;
    j["a"] = c.a;
    j["b"] = c.b;
    j["r"] = c.r;
    j["p"] = c.p;
    j["n"] = c.n;
    return j;
}

}  // namespace causim
