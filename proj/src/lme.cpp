#include "gazeaffect/lme.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "gazeaffect/error.hpp"

namespace gazeaffect::stats {

namespace {

struct GroupSums {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
};

// Sufficient statistics on globally centred x and y.
struct Prepared {
    std::vector<GroupSums> groups;
    double n_obs = 0;
    double x_mean = 0;
    double y_mean = 0;
};

struct Profile {
    double a00 = 0, a01 = 0, a11 = 0;  // X' H^-1 X
    double det = 0;
    double b0 = 0, b1 = 0;  // centred GLS coefficients
    double sigma2 = 0;
    double loglik = 0;
};

Prepared prepare(const LmeData& data) {
    const std::size_t n = data.x.size();
    if (data.y.size() != n || data.group.size() != n)
        throw Error(Errc::LengthMismatch, "LME predictor, outcome and group vectors differ in length");
    Prepared p;
    p.n_obs = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.x_mean += data.x[i];
        p.y_mean += data.y[i];
    }
    if (n > 0) {
        p.x_mean /= p.n_obs;
        p.y_mean /= p.n_obs;
    }
    p.groups.assign(data.n_groups, {});
    for (std::size_t i = 0; i < n; ++i) {
        if (data.group[i] >= data.n_groups)
            throw Error(Errc::InvalidSpec, "group index " + std::to_string(data.group[i]) + " out of range");
        auto& g = p.groups[data.group[i]];
        const double x = data.x[i] - p.x_mean;
        const double y = data.y[i] - p.y_mean;
        g.n += 1;
        g.sx += x;
        g.sy += y;
        g.sxx += x * x;
        g.sxy += x * y;
        g.syy += y * y;
    }
    std::erase_if(p.groups, [](const GroupSums& g) { return g.n == 0; });
    return p;
}

Profile profile(const Prepared& p, double lambda) {
    Profile out;
    double yy = 0, r0 = 0, r1 = 0, logdet_h = 0;
    for (const auto& g : p.groups) {
        const double c = lambda / (1.0 + lambda * g.n);
        out.a00 += g.n - c * g.n * g.n;
        out.a01 += g.sx - c * g.n * g.sx;
        out.a11 += g.sxx - c * g.sx * g.sx;
        r0 += g.sy - c * g.n * g.sy;
        r1 += g.sxy - c * g.sx * g.sy;
        yy += g.syy - c * g.sy * g.sy;
        logdet_h += std::log1p(lambda * g.n);
    }
    out.det = out.a00 * out.a11 - out.a01 * out.a01;
    out.b0 = (out.a11 * r0 - out.a01 * r1) / out.det;
    out.b1 = (out.a00 * r1 - out.a01 * r0) / out.det;
    const double rss = yy - (out.b0 * r0 + out.b1 * r1);
    const double dof = p.n_obs - 2.0;
    out.sigma2 = rss / dof;
    out.loglik = -0.5 * (dof * (std::log(2.0 * std::numbers::pi) + std::log(out.sigma2) + 1.0) + logdet_h +
                         std::log(out.det));
    return out;
}

void check_design(const Prepared& p) {
    if (p.n_obs < 3) throw Error(Errc::SingularDesign, "LME needs at least 3 observations");
    const Profile ols = profile(p, 0.0);
    if (!(ols.det > 1e-12 * ols.a00 * ols.a11) || ols.a11 <= 0.0)
        throw Error(Errc::SingularDesign, "predictor is constant; design matrix is singular");
    if (!(ols.sigma2 > 0.0)) throw Error(Errc::SingularDesign, "outcome is fitted exactly; residual variance is 0");
}

LmeFit finish(const Prepared& p, double lambda, bool degenerate) {
    const Profile pr = profile(p, lambda);
    if (!(pr.det > 0.0) || !(pr.sigma2 > 0.0) || !std::isfinite(pr.loglik)) {
        std::ostringstream msg;
        msg << "design is singular at lambda=" << lambda;
        throw Error(Errc::SingularDesign, msg.str());
    }
    LmeFit fit;
    fit.lambda = lambda;
    fit.sigma2_e = pr.sigma2;
    fit.sigma2_u = lambda * pr.sigma2;
    fit.beta1 = pr.b1;
    fit.beta0 = p.y_mean + pr.b0 - pr.b1 * p.x_mean;
    // Covariance sigma2 * A^-1 of the centred coefficients, then mapped to the raw intercept.
    const double v00 = pr.sigma2 * pr.a11 / pr.det;
    const double v01 = -pr.sigma2 * pr.a01 / pr.det;
    const double v11 = pr.sigma2 * pr.a00 / pr.det;
    fit.se_beta1 = std::sqrt(v11);
    fit.se_beta0 = std::sqrt(std::max(0.0, v00 - 2.0 * p.x_mean * v01 + p.x_mean * p.x_mean * v11));
    fit.p_beta1 = normal_two_sided_p(fit.beta1 / fit.se_beta1);
    fit.loglik = pr.loglik;
    fit.n_obs = static_cast<std::size_t>(p.n_obs);
    fit.n_groups = p.groups.size();
    fit.degenerate = degenerate;
    return fit;
}

}  // namespace

double reml_loglik(const LmeData& data, double lambda) {
    const Prepared p = prepare(data);
    check_design(p);
    return profile(p, lambda).loglik;
}

LmeFit fit_lme_fixed(const LmeData& data, double lambda) {
    if (!(lambda >= 0.0)) throw Error(Errc::InvalidSpec, "variance ratio must be >= 0");
    const Prepared p = prepare(data);
    check_design(p);
    return finish(p, lambda, p.groups.size() < 2);
}

LmeFit fit_lme(const LmeData& data, const LmeOptions& options) {
    const Prepared p = prepare(data);
    check_design(p);
    if (p.groups.size() < 2) return finish(p, 0.0, true);

    const double hi = std::log1p(options.max_lambda);
    auto objective = [&](double s) {
        const double ll = profile(p, std::expm1(s)).loglik;
        if (!std::isfinite(ll)) {
            std::ostringstream msg;
            msg << "restricted log-likelihood is not finite at log(1+lambda)=" << s << " in bracket [0, " << hi
                << "]";
            throw Error(Errc::ConvergenceFailure, msg.str());
        }
        return ll;
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    int iter = 0;
    while (b - a > options.tolerance) {
        if (++iter > 500) {
            std::ostringstream msg;
            msg << "golden-section search did not converge; bracket [" << a << ", " << b << "]";
            throw Error(Errc::ConvergenceFailure, msg.str());
        }
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    double best_s = 0.5 * (a + b);
    double best = objective(best_s);
    for (double s : {0.0, hi}) {
        const double f = objective(s);
        if (f > best) {
            best = f;
            best_s = s;
        }
    }
    return finish(p, best_s == 0.0 ? 0.0 : (best_s == hi ? options.max_lambda : std::expm1(best_s)), false);
}

LmeData lme_data(std::span<const FeatureRow> rows, const Metric& predictor, const Metric& outcome) {
    LmeData data;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& row : rows) {
        const auto x = predictor(row);
        const auto y = outcome(row);
        if (!x || !y) continue;
        auto [it, inserted] = index.try_emplace(row.participant_id, index.size());
        data.x.push_back(*x);
        data.y.push_back(*y);
        data.group.push_back(it->second);
    }
    data.n_groups = index.size();
    return data;
}

}  // namespace gazeaffect::stats
