#include "lshawkes/model.hpp"

#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lshawkes {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

void require_positive_decay(const Curve& decay) {
    if (!(decay.min_value() > 0.0)) {
        throw InvalidModel("fertility decay rate must be strictly positive everywhere");
    }
}

} // namespace

std::string to_string(FertilityFamily::Kind kind) {
    switch (kind) {
    case FertilityFamily::Kind::zero:
        return "zero";
    case FertilityFamily::Kind::exponential:
        return "exponential";
    case FertilityFamily::Kind::gamma_shape:
        return "gamma-shape";
    case FertilityFamily::Kind::sampled_table:
        return "sampled-table";
    }
    return "unknown";
}

BaselineCurve BaselineCurve::from_curve(Curve c, double beta) {
    BaselineCurve b;
    b.sup_bound = std::max(0.0, c.max_value());
    b.holder_beta = beta;
    // Lipschitz bound covers |dv| <= 1, the range covers |dv| > 1.
    b.holder_const = std::max(c.lipschitz(), c.max_value() - c.min_value());
    b.curve = std::move(c);
    return b;
}

// ------------------------------------------------------------ FertilityFamily

FertilityFamily FertilityFamily::zero() {
    FertilityFamily f;
    f.kind_ = Kind::zero;
    f.default_tail();
    return f;
}

FertilityFamily FertilityFamily::exponential(Curve zeta, Curve decay) {
    require_positive_decay(decay);
    FertilityFamily f;
    f.kind_ = Kind::exponential;
    f.zeta_ = std::move(zeta);
    f.decay_ = std::move(decay);
    f.default_tail();
    return f;
}

FertilityFamily FertilityFamily::gamma_shape(Curve zeta, Curve decay, int shape) {
    require_positive_decay(decay);
    if (shape < 1 || shape > 20) {
        throw InvalidModel("gamma-shape fertility needs an integer shape in [1, 20]");
    }
    FertilityFamily f;
    f.kind_ = Kind::gamma_shape;
    f.zeta_ = std::move(zeta);
    f.decay_ = std::move(decay);
    f.shape_ = shape;
    f.default_tail();
    return f;
}

FertilityFamily FertilityFamily::sampled_table(Curve zeta, double ds, std::vector<double> values) {
    if (!(ds > 0.0) || values.size() < 2) {
        throw InvalidModel("sampled-table fertility needs ds > 0 and at least two values");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw InvalidModel("sampled-table fertility values must be finite and nonnegative");
        }
        if (i > 0) {
            mass += 0.5 * (values[i] + values[i - 1]) * ds;
        }
    }
    if (!(mass > 0.0)) {
        throw InvalidModel("sampled-table fertility must have positive mass");
    }
    FertilityFamily f;
    f.kind_ = Kind::sampled_table;
    f.zeta_ = std::move(zeta);
    f.ds_ = ds;
    f.table_ = std::move(values);
    for (auto& v : f.table_) {
        v /= mass;
    }
    f.suffix_max_.resize(f.table_.size());
    double m = 0.0;
    for (std::size_t i = f.table_.size(); i-- > 0;) {
        m = std::max(m, f.table_[i]);
        f.suffix_max_[i] = m;
    }
    f.default_tail();
    return f;
}

void FertilityFamily::default_tail() {
    const double zmax = std::max(0.0, zeta_.max_value());
    switch (kind_) {
    case Kind::zero:
        tail_rate_ = 1.0;
        tail_const_ = 0.0;
        break;
    case Kind::exponential:
        tail_rate_ = decay_.min_value();
        tail_const_ = zmax * decay_.max_value();
        break;
    case Kind::gamma_shape: {
        const double dmin = decay_.min_value();
        const double dmax = decay_.max_value();
        const int k = shape_;
        tail_rate_ = 0.5 * dmin;
        // sup_s s^{k-1} e^{-(dmin/2) s}
        const double bump =
            k == 1 ? 1.0 : std::pow((k - 1) / (0.5 * dmin), k - 1) * std::exp(-(k - 1.0));
        tail_const_ = zmax * std::pow(dmax, k) / factorial(k - 1) * bump;
        break;
    }
    case Kind::sampled_table: {
        const double span = ds_ * static_cast<double>(table_.size() - 1);
        tail_rate_ = 1.0 / span;
        tail_const_ = zmax * suffix_max_.front() * std::exp(1.0);
        break;
    }
    }
}

void FertilityFamily::set_tail(double rate, double c) {
    if (!(rate > 0.0) || !(c >= 0.0)) {
        throw InvalidModel("tail envelope needs rate > 0 and const >= 0");
    }
    tail_rate_ = rate;
    tail_const_ = c;
}

double FertilityFamily::zeta(double u) const {
    return kind_ == Kind::zero ? 0.0 : zeta_(u);
}

double FertilityFamily::density(double s, double u) const {
    if (s < 0.0) {
        return 0.0;
    }
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::exponential: {
        const double d = decay_(u);
        return zeta_(u) * d * std::exp(-d * s);
    }
    case Kind::gamma_shape: {
        const double d = decay_(u);
        const int k = shape_;
        return zeta_(u) * std::pow(d, k) * std::pow(s, k - 1) * std::exp(-d * s) / factorial(k - 1);
    }
    case Kind::sampled_table: {
        const double x = s / ds_;
        const double last = static_cast<double>(table_.size() - 1);
        if (x > last) {
            return 0.0;
        }
        const auto i = std::min(static_cast<std::size_t>(x), table_.size() - 2);
        const double w = x - static_cast<double>(i);
        return zeta_(u) * (table_[i] + w * (table_[i + 1] - table_[i]));
    }
    }
    return 0.0;
}

std::complex<double> FertilityFamily::transform(double omega, double u) const {
    using cd = std::complex<double>;
    switch (kind_) {
    case Kind::zero:
        return {0.0, 0.0};
    case Kind::exponential: {
        const double d = decay_(u);
        return zeta_(u) * d / cd(d, omega);
    }
    case Kind::gamma_shape: {
        const double d = decay_(u);
        return zeta_(u) * std::pow(d / cd(d, omega), shape_);
    }
    case Kind::sampled_table: {
        if (std::abs(omega) * ds_ > kPi) {
            throw QuadratureFailure("fertility table step " + std::to_string(ds_) +
                                    " is too coarse for omega=" + std::to_string(omega));
        }
        auto trapezoid = [&](int refine) {
            const std::size_t n = (table_.size() - 1) * static_cast<std::size_t>(refine);
            const double h = ds_ / refine;
            cd acc{0.0, 0.0};
            for (std::size_t i = 0; i <= n; ++i) {
                const double s = h * static_cast<double>(i);
                const std::size_t j = i / static_cast<std::size_t>(refine);
                const double w = static_cast<double>(i % static_cast<std::size_t>(refine)) / refine;
                const double g = j + 1 < table_.size() ? table_[j] + w * (table_[j + 1] - table_[j])
                                                       : table_.back();
                const double edge = (i == 0 || i == n) ? 0.5 : 1.0;
                acc += edge * g * std::polar(1.0, -omega * s);
            }
            return acc * h;
        };
        const cd coarse = trapezoid(1);
        const cd fine = trapezoid(10);
        // Richardson estimate of the refined rule's own error.
        if (std::abs(coarse - fine) / 99.0 > 1e-3) {
            throw QuadratureFailure("fertility table quadrature not converged at omega=" +
                                    std::to_string(omega));
        }
        return zeta_(u) * fine;
    }
    }
    return {0.0, 0.0};
}

double FertilityFamily::majorant(double s) const {
    s = std::max(s, 0.0);
    const double zmax = std::max(0.0, zeta_.max_value());
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::exponential:
        return zmax * decay_.max_value() * std::exp(-decay_.min_value() * s);
    case Kind::gamma_shape: {
        const double dmin = decay_.min_value();
        const double dmax = decay_.max_value();
        const int k = shape_;
        const double norm = zmax / factorial(k - 1);
        const double s0 = (k - 1) / dmin;
        if (s <= s0) {
            // Global maximum over s and decay: at s = (k-1)/d the bump equals
            // d (k-1)^{k-1} e^{-(k-1)}, largest for d = dmax.
            if (k == 1) {
                return norm * dmax;
            }
            return norm * dmax * std::pow(k - 1.0, k - 1) * std::exp(-(k - 1.0));
        }
        const double d = std::clamp(k / s, dmin, dmax);
        return norm * std::pow(d, k) * std::pow(s, k - 1) * std::exp(-d * s);
    }
    case Kind::sampled_table: {
        const auto i = static_cast<std::size_t>(s / ds_);
        if (i >= suffix_max_.size()) {
            return 0.0;
        }
        return zmax * suffix_max_[i];
    }
    }
    return 0.0;
}

double FertilityFamily::truncation_horizon(double eps) const {
    if (majorant(0.0) < eps) {
        return 0.0;
    }
    if (kind_ == Kind::exponential) {
        const double zmax = zeta_.max_value();
        return std::log(zmax * decay_.max_value() / eps) / decay_.min_value();
    }
    double hi = 1.0;
    while (majorant(hi) >= eps) {
        hi *= 2.0;
        if (hi > 1e15) {
            throw InvalidModel("fertility majorant does not decay");
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (majorant(mid) >= eps ? lo : hi) = mid;
    }
    return hi;
}

FertilityFamily FertilityFamily::frozen_at(double u) const {
    FertilityFamily f = *this;
    f.zeta_ = Curve::constant(zeta_(u));
    f.decay_ = Curve::constant(decay_(u));
    f.default_tail();
    return f;
}

LsHawkesModel LsHawkesModel::frozen_at(double u) const {
    LsHawkesModel m;
    m.baseline = BaselineCurve::from_curve(Curve::constant(baseline(u)), baseline.holder_beta);
    m.fertility = fertility.frozen_at(u);
    m.beta = beta;
    return m;
}

// ------------------------------------------------------------ validation

const ConditionCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

namespace {

// Support over which p(.; u) is numerically nonzero, with breakpoints.
std::vector<double> fertility_breaks(const FertilityFamily& f) {
    if (f.kind() == FertilityFamily::Kind::sampled_table) {
        std::vector<double> b;
        for (std::size_t i = 0; i < f.table_values().size(); ++i) {
            b.push_back(f.table_step() * static_cast<double>(i));
        }
        return b;
    }
    const double s_max = std::max(f.truncation_horizon(1e-16), 1e-6);
    return {0.0, s_max};
}

template <class F>
double integrate_s(const std::vector<double>& breaks, F&& g) {
    const double span = breaks.back() - breaks.front();
    return numeric::composite_gauss<8>(g, breaks, span / 512.0);
}

} // namespace

ValidationReport validate_model(const LsHawkesModel& model, int grid_resolution) {
    if (grid_resolution < 16) {
        throw DomainError("validate_model needs grid_resolution >= 16");
    }
    const auto& base = model.baseline;
    const auto& fert = model.fertility;
    const auto n = static_cast<std::size_t>(grid_resolution);
    std::vector<double> us(n);
    for (std::size_t i = 0; i < n; ++i) {
        us[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    }

    ValidationReport r;
    auto add = [&](std::string name, bool ok, double measured, double limit, std::string note = {}) {
        r.checks.push_back({std::move(name), ok, measured, limit, std::move(note)});
    };

    add("beta-range", model.beta > 0.0 && model.beta <= 1.0, model.beta, 1.0);

    // Subcriticality, measured both from the curve's exact range and from the
    // integral of p on the grid.
    const auto breaks = fertility_breaks(fert);
    double zeta_sup = fert.kind() == FertilityFamily::Kind::zero ? 0.0 : fert.zeta_curve().max_value();
    double mass_err = 0.0;
    for (double u : us) {
        const double mass = integrate_s(breaks, [&](double s) { return fert.density(s, u); });
        zeta_sup = std::max(zeta_sup, mass);
        mass_err = std::max(mass_err, std::abs(mass - fert.zeta(u)));
    }
    add("subcriticality", zeta_sup < 1.0, zeta_sup, 1.0, "sup_u int p(s;u) ds < 1");
    add("fertility-mass", mass_err <= 1e-6, mass_err, 1e-6, "int p(.;u) matches zeta(u)");

    const double lmin = base.curve.min_value();
    add("baseline-nonnegative", lmin >= 0.0, lmin, 0.0);
    double lmax = base.curve.max_value();
    for (double u : us) {
        lmax = std::max(lmax, base(u));
    }
    add("baseline-bounded", std::isfinite(lmax) && lmax <= base.sup_bound * (1.0 + 1e-12), lmax,
        base.sup_bound);

    // Causality and positivity on an (s, u) grid.
    const double s_span = breaks.back();
    const std::size_t ns = 8 * n;
    double causal = 0.0;
    double pmin = std::numeric_limits<double>::infinity();
    double envelope_ratio = 0.0;
    for (double u : us) {
        for (std::size_t j = 0; j <= ns; ++j) {
            const double s = s_span * static_cast<double>(j) / static_cast<double>(ns);
            causal = std::max(causal, std::abs(fert.density(-s - 1e-9, u)));
            const double p = fert.density(s, u);
            pmin = std::min(pmin, p);
            const double env = fert.tail_const() * std::exp(-fert.tail_rate() * s);
            if (p > 0.0) {
                envelope_ratio = std::max(envelope_ratio, env > 0.0 ? p / env
                                                                    : std::numeric_limits<double>::infinity());
            }
        }
        pmin = std::min(pmin, fert.zeta(u));
    }
    add("causal-support", causal == 0.0, causal, 0.0, "p(s;u) = 0 for s < 0");
    add("fertility-nonnegative", pmin >= 0.0, pmin, 0.0);
    add("exponential-envelope", envelope_ratio <= 1.0 + 1e-9, envelope_ratio, 1.0,
        "max p(s;u) / (C e^{-d s})");

    // Hölder checks on dyadic separations.
    double holder_base = 0.0;
    double holder_fert = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 1; i + d < n; d *= 2) {
            const double u = us[i];
            const double v = us[i + d];
            const double gap = std::pow(v - u, base.holder_beta);
            holder_base = std::max(holder_base, std::abs(base(v) - base(u)) / gap);
            const double l1 = integrate_s(
                breaks, [&](double s) { return std::abs(fert.density(s, v) - fert.density(s, u)); });
            holder_fert = std::max(holder_fert, l1 / std::pow(v - u, model.beta));
        }
    }
    add("baseline-holder", holder_base <= base.holder_const * (1.0 + 1e-9) + 1e-12, holder_base,
        base.holder_const);
    if (const auto declared = fert.holder_envelope_l1()) {
        add("fertility-holder-l1", holder_fert <= *declared * (1.0 + 1e-9) + 1e-12, holder_fert,
            *declared);
    } else {
        add("fertility-holder-l1", std::isfinite(holder_fert), holder_fert,
            std::numeric_limits<double>::infinity(), "no declared constant; finiteness only");
    }

    r.passed = std::all_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.passed; });
    return r;
}

// ------------------------------------------------------------ closed forms

double local_mean_density(const LsHawkesModel& model, double u) {
    const double z = model.fertility.zeta(u);
    if (!(z < 1.0)) {
        throw InvalidModel("branching ratio " + std::to_string(z) + " >= 1 at u=" + std::to_string(u));
    }
    const double lc = model.baseline(u);
    if (lc < 0.0) {
        throw InvalidModel("negative baseline at u=" + std::to_string(u));
    }
    return lc / (1.0 - z);
}

std::complex<double> fertility_ft(const LsHawkesModel& model, double u, double omega) {
    return model.fertility.transform(omega, u);
}

double local_bartlett(const LsHawkesModel& model, double u, double omega) {
    const double m1 = local_mean_density(model, u);
    const auto ph = fertility_ft(model, u, omega);
    return m1 / kTwoPi / std::norm(1.0 - ph);
}

double regularized_bartlett(const LsHawkesModel& model, double u0, double omega0, double b2,
                            const FreqKernel& q) {
    if (!(b2 > 0.0)) {
        throw DomainError("regularized_bartlett needs b2 > 0");
    }
    // The weight |Q|^2 has unit mass, so integrate only gamma - gamma_inf,
    // which decays in omega on top of |Q|^2.
    const double flat = local_mean_density(model, u0) / kTwoPi;
    if (model.fertility.kind() == FertilityFamily::Kind::zero) {
        return flat;
    }
    const double len = q.support().length();
    const double reach = 2000.0 / len;
    const std::vector<double> breaks{-reach, reach};
    auto integrand = [&](double x) {
        return std::norm(q.transform(x)) * (local_bartlett(model, u0, omega0 + b2 * x) - flat);
    };
    // Panels of a quarter period of |Q|^2, halved while the two rules
    // disagree (gamma has poles close to the real axis when b2 is large
    // compared to the spectral feature width).
    double panel = kPi / len;
    for (int attempt = 0; attempt < 12; ++attempt, panel *= 0.5) {
        const double coarse = numeric::composite_gauss<8>(integrand, breaks, panel);
        const double fine = numeric::composite_gauss<16>(integrand, breaks, panel);
        if (std::abs(coarse - fine) <= 1e-9 * (std::abs(fine) + flat)) {
            return flat + fine;
        }
    }
    throw QuadratureFailure("regularized Bartlett quadrature did not converge");
}

double identify_baseline(double m1, double gamma_at_zero) {
    if (!(gamma_at_zero > 0.0)) {
        throw DomainError("identify_baseline needs gamma(0) > 0");
    }
    if (m1 < 0.0) {
        throw DomainError("identify_baseline needs m1 >= 0");
    }
    return m1 * std::sqrt(m1 / (kTwoPi * gamma_at_zero));
}

} // namespace lshawkes
