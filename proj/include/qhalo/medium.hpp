#pragma once

#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qhalo/params.hpp"

namespace qhalo::medium {

struct SpectralLine {
    std::size_t l{0};
    std::size_t m{0};
    double J2{0.0};     // |J_lm|²
    double width{0.0};  // Lorentzian half-width, frequency units
};

/// Molecular levels and dipole lines. J is symmetric, so one entry (l, m) stands
/// for both orderings.
struct MolecularSpectrum {
    std::vector<double> energies;
    std::vector<SpectralLine> lines;

    void validate() const {
        if (energies.empty()) throw std::invalid_argument("MolecularSpectrum: no levels");
        for (double e : energies)
            if (!std::isfinite(e)) throw std::invalid_argument("MolecularSpectrum: non-finite level energy");
        for (const auto& ln : lines) {
            if (ln.l >= energies.size() || ln.m >= energies.size())
                throw std::invalid_argument("MolecularSpectrum: line refers to an unknown level");
            if (!(ln.J2 >= 0.0) || !std::isfinite(ln.J2))
                throw std::invalid_argument("MolecularSpectrum: |J|² must be non-negative");
            if (!(ln.width > 0.0) || !std::isfinite(ln.width))
                throw std::invalid_argument("MolecularSpectrum: line width must be positive");
        }
    }

    /// Transition frequency (E_l − E_m)/ħ of a line.
    double frequency(const SpectralLine& ln, double hbar = 1.0) const {
        return (energies[ln.l] - energies[ln.m]) / hbar;
    }
};

/// Bulk medium parameters. Spatially varying density or temperature fields may be
/// given but must be constant.
struct MediumSpec {
    double beta{1.0};      // 1/k_BT
    double density{1.0};   // number density d
    double coupling{1.0};  // g
    double cutoff{1.0};    // Γ, wave number
    double hbar{1.0};
    std::vector<double> density_field;
    std::vector<double> beta_field;

    /// Throws on invalid input; returns advisory warnings.
    std::vector<std::string> validate() const {
        auto positive = [](double v, const char* what) {
            if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("MediumSpec: ") + what + " must be positive");
        };
        positive(beta, "beta");
        positive(density, "density");
        positive(coupling, "coupling");
        positive(cutoff, "cutoff");
        positive(hbar, "hbar");
        auto constant = [](const std::vector<double>& f, double v, const char* what) {
            for (double x : f)
                if (std::abs(x - v) > 1e-12 * std::abs(v))
                    throw std::invalid_argument(std::string("MediumSpec: ") + what +
                                                " field must be spatially constant and equal to the bulk value");
        };
        constant(density_field, density, "density");
        constant(beta_field, beta, "beta");
        std::vector<std::string> warnings;
        if (density < cutoff * cutoff * cutoff) {
            std::ostringstream msg;
            msg << "density " << density << " < cutoff³ " << cutoff * cutoff * cutoff
                << ": too few molecules per cutoff volume for the linear-medium limit";
            warnings.push_back(msg.str());
        }
        return warnings;
    }
};

/// Normalized Lorentzian with half-width γ.
inline double lorentzian(double dw, double gamma) { return gamma / (kPi * (dw * dw + gamma * gamma)); }

/// Effective bath spectral density at frequency ω > 0, with each line's delta
/// function broadened to a Lorentzian. Both orderings (l, m) and (m, l) are summed.
/// The sinh weight is taken at the line frequency, which is the same thing under a
/// delta function; at ω it would grow like e^{ħβω/2} across the Lorentzian wings.
inline double spectral_density(const MolecularSpectrum& spec, double beta, double omega, double hbar = 1.0) {
    spec.validate();
    if (!(omega > 0.0)) throw std::invalid_argument("spectral_density: omega must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("spectral_density: beta must be > 0");
    if (spec.lines.empty()) return 0.0;
    double Z = 0.0;
    for (double e : spec.energies) Z += std::exp(-beta * e);
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw std::domain_error("spectral_density: partition sum under/overflows; shift the level energies");
    double sum = 0.0;
    for (const auto& ln : spec.lines) {
        const double w = spec.frequency(ln, hbar);
        // reversed ordering sits at −w with weight sinh(−ħβw/2)
        sum += ln.J2 * std::sinh(0.5 * hbar * beta * w) * (lorentzian(omega - w, ln.width) - lorentzian(omega + w, ln.width));
    }
    return 4.0 * omega * sum / (hbar * Z);
}

/// Im K(ω) = πg²I(β, ω)/(2ω).
inline double im_K(const MolecularSpectrum& spec, const MediumSpec& medium, double omega) {
    medium.validate();
    return kPi * medium.coupling * medium.coupling * spectral_density(spec, medium.beta, omega, medium.hbar) /
           (2.0 * omega);
}

/// Principal square root, taken on the branch with Im n ≥ 0.
inline Complex refractive_index(Complex K) {
    Complex n = std::sqrt(K);
    if (n.imag() < 0.0) n = -n;
    return n;
}

/// D = 8γk_BT/(ħΩ²).
inline double ohmic_D(double gamma, double kBT, const SimParams& params) {
    params.validate();
    if (!(gamma >= 0.0) || !(kBT >= 0.0)) throw std::invalid_argument("ohmic_D: gamma and kBT must be >= 0");
    return 8.0 * gamma * kBT / (params.hbar * params.omega * params.omega);
}

struct KKOptions {
    double omega_max{1e4};             // upper end of the explicit integration range
    double tol{1e-11};
    unsigned max_depth{18};
    std::vector<double> breakpoints;   // extra panel edges, e.g. line centers
};

struct KKValue {
    double value{0.0};
    double error{0.0};      // quadrature error estimate
    bool degraded{false};   // ω too close to the support edge or no usable decay beyond it
};

namespace detail {

/// Panel edges covering [0, W] with ω and the breakpoints inside.
inline std::vector<double> panels(double w, double W, const std::vector<double>& breakpoints) {
    std::vector<double> pts{0.0, W};
    if (w > 0.0 && w < W) pts.push_back(w);
    for (double b : breakpoints)
        if (b > 0.0 && b < W) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [W](double a, double b) { return std::abs(a - b) <= 1e-14 * W; }),
              pts.end());
    return pts;
}

template <class F>
double integrate_panels(F&& f, const std::vector<double>& pts, const KKOptions& opt, double& error) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1], opt.max_depth,
                                                                               opt.tol, &err);
        error += err;
    }
    return total;
}

/// Decay exponent k of f ∝ ω^{−k} near W, from two samples; 0 if unusable.
inline double decay_exponent(double f_lo, double f_hi, double w_lo, double w_hi) {
    if (f_hi == 0.0) return 0.0;
    if (!(f_lo / f_hi > 0.0)) return 0.0;
    return std::log(f_lo / f_hi) / std::log(w_hi / w_lo);
}

template <class F>
KKValue re_from_im(F&& f, double w, double W, double tail_k, const KKOptions& opt) {
    if (!(w >= 0.0)) throw std::invalid_argument("re_K: omega must be >= 0");
    KKValue out;
    const double fw = w > 0.0 ? f(w) : 0.0;
    auto g = [&](double x) {
        if (w == 0.0) return f(x) / x;
        return (x * f(x) - w * fw) / ((x - w) * (x + w));
    };
    double sum = integrate_panels(g, panels(w, W, opt.breakpoints), opt, out.error);
    // PV ∫_0^W dx/(x² − ω²) = ln|(W − ω)/(W + ω)|/(2ω)
    if (w > 0.0 && w != W) sum += 0.5 * fw * std::log(std::abs((W - w) / (W + w)));
    const double fW = f(W);
    if (fW != 0.0) {
        if (tail_k > 0.0) sum += fW * (1.0 / tail_k + w * w / ((tail_k + 2.0) * W * W));
        else out.degraded = true;
    }
    if (w > 0.99 * W) out.degraded = true;
    out.value = 1.0 + 2.0 / kPi * sum;
    out.error *= 2.0 / kPi;
    return out;
}

template <class G>
KKValue im_from_re(G&& g, double w, double W, double tail_k, const KKOptions& opt) {
    if (!(w >= 0.0)) throw std::invalid_argument("im_K_from_re: omega must be >= 0");
    KKValue out;
    if (w == 0.0) return out;
    const double gw = g(w);
    auto h = [&](double x) { return (g(x) - gw) / ((x - w) * (x + w)); };
    double sum = integrate_panels(h, panels(w, W, opt.breakpoints), opt, out.error);
    if (w != W) sum += gw * std::log(std::abs((W - w) / (W + w))) / (2.0 * w);
    const double gW = g(W);
    if (gW != 0.0) {
        if (tail_k > 0.0) sum += gW * (1.0 / ((tail_k + 1.0) * W) + w * w / ((tail_k + 3.0) * W * W * W));
        else out.degraded = true;
    }
    if (w > 0.99 * W) out.degraded = true;
    out.value = -2.0 * w / kPi * sum;
    out.error *= 2.0 * w / kPi;
    return out;
}

}  // namespace detail

/// Re K(ω) = 1 + (2/π) PV ∫_0^∞ ω' Im K(ω')/(ω'² − ω²) dω' for Im K given as a function.
/// The singular part is subtracted analytically; beyond omega_max the integrand is
/// continued as a power law fitted at the edge.
template <class F>
KKValue re_K(F&& imK, double omega, const KKOptions& opt = {}) {
    const double W = opt.omega_max;
    if (!(W > 0.0)) throw std::invalid_argument("re_K: omega_max must be > 0");
    const double k = detail::decay_exponent(imK(0.98 * W), imK(W), 0.98 * W, W);
    return detail::re_from_im(imK, omega, W, k, opt);
}

/// Inverse relation Im K(ω) = −(2ω/π) PV ∫_0^∞ (Re K(ω') − 1)/(ω'² − ω²) dω', given Re K − 1.
template <class G>
KKValue im_K_from_re(G&& reK_minus_1, double omega, const KKOptions& opt = {}) {
    const double W = opt.omega_max;
    if (!(W > 0.0)) throw std::invalid_argument("im_K_from_re: omega_max must be > 0");
    const double k = detail::decay_exponent(reK_minus_1(0.98 * W), reK_minus_1(W), 0.98 * W, W);
    return detail::im_from_re(reK_minus_1, omega, W, k, opt);
}

/// Tabulated function on increasing ω > 0, interpolated rationally in ln ω.
/// Below the first node it continues as odd (∝ ω) or even (constant).
class TabulatedFunction {
public:
    enum class Parity { odd, even };

    TabulatedFunction(const std::vector<double>& omega, const std::vector<double>& values, Parity parity)
        : lo_(omega.empty() ? 0.0 : omega.front()),
          hi_(omega.empty() ? 0.0 : omega.back()),
          parity_(parity) {
        if (omega.size() < 4 || omega.size() != values.size())
            throw std::invalid_argument("TabulatedFunction: need >= 4 matching samples");
        std::vector<double> u(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (!(omega[i] > 0.0) || (i > 0 && !(omega[i] > omega[i - 1])))
                throw std::invalid_argument("TabulatedFunction: frequencies must be positive and increasing");
            u[i] = std::log(omega[i]);
        }
        lo_value_ = values.front();
        hi_value_ = values.back();
        tail_k_ = detail::decay_exponent(values[values.size() - 2], values.back(), omega[omega.size() - 2], omega.back());
        interp_ = std::make_shared<boost::math::barycentric_rational<double>>(u.data(), values.data(),
                                                                                              u.size(), 3);
    }

    double operator()(double w) const {
        if (w <= lo_) return parity_ == Parity::odd ? lo_value_ * w / lo_ : lo_value_;
        if (w >= hi_) return hi_value_ * std::pow(hi_ / w, std::max(tail_k_, 0.0));
        return (*interp_)(std::log(w));
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double tail_exponent() const { return tail_k_; }

private:
    double lo_;
    double hi_;
    Parity parity_;
    double lo_value_{0.0};
    double hi_value_{0.0};
    double tail_k_{0.0};
    std::shared_ptr<boost::math::barycentric_rational<double>> interp_;
};

struct DielectricTable {
    std::vector<double> omega;
    std::vector<double> im_K;
    std::vector<double> re_K;
    std::vector<double> error;
    std::vector<bool> degraded;
};

/// One panel per table interval: the interpolant is smooth inside each, and its
/// noise floor would otherwise drive the adaptive rule to full depth.
inline void table_panels(const std::vector<double>& omega, KKOptions& opt) {
    opt.breakpoints.insert(opt.breakpoints.end(), omega.begin(), omega.end());
    opt.tol = std::max(opt.tol, 1e-9);
    opt.max_depth = std::min(opt.max_depth, 6u);
}

/// Re K on the table's own frequencies from tabulated Im K. Support ends at the last node.
inline DielectricTable re_K(const std::vector<double>& omega, const std::vector<double>& imK, KKOptions opt = {}) {
    const TabulatedFunction f(omega, imK, TabulatedFunction::Parity::odd);
    table_panels(omega, opt);
    DielectricTable t;
    t.omega = omega;
    t.im_K = imK;
    for (double w : omega) {
        auto v = detail::re_from_im(f, w, f.hi(), f.tail_exponent(), opt);
        if (w >= omega[omega.size() - 2]) v.degraded = true;
        t.re_K.push_back(v.value);
        t.error.push_back(v.error);
        t.degraded.push_back(v.degraded);
    }
    return t;
}

/// Im K at the requested frequencies from tabulated Re K.
inline std::vector<KKValue> im_K_from_re(const std::vector<double>& omega, const std::vector<double>& reK,
                                         const std::vector<double>& at, KKOptions opt = {}) {
    std::vector<double> g(reK.size());
    for (std::size_t i = 0; i < reK.size(); ++i) g[i] = reK[i] - 1.0;
    const TabulatedFunction f(omega, g, TabulatedFunction::Parity::even);
    table_panels(omega, opt);
    std::vector<KKValue> out;
    for (double w : at) {
        auto v = detail::im_from_re(f, w, f.hi(), f.tail_exponent(), opt);
        if (w >= omega[omega.size() - 2]) v.degraded = true;
        out.push_back(v);
    }
    return out;
}

/// Log-spaced frequencies on [lo, hi] with extra nodes within a few widths of each line.
inline std::vector<double> frequency_grid(double lo, double hi, std::size_t points, const MolecularSpectrum& spec = {},
                                          double hbar = 1.0, std::size_t per_line = 24) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("frequency_grid: need 0 < lo < hi");
    std::vector<double> w;
    for (std::size_t i = 0; i < points; ++i)
        w.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1)));
    for (const auto& ln : spec.lines) {
        const double c = std::abs(spec.energies.at(ln.l) - spec.energies.at(ln.m)) / hbar;
        for (std::size_t k = 0; k < per_line; ++k) {
            const double x = -4.0 + 8.0 * static_cast<double>(k) / static_cast<double>(per_line - 1);
            const double v = c + x * ln.width;
            if (v > lo && v < hi) w.push_back(v);
        }
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }), w.end());
    return w;
}

struct DielectricFunction {
    std::vector<double> omega;
    std::vector<double> spectral;  // I(β, ω)
    std::vector<double> im_K;
    std::vector<double> re_K;
    std::vector<Complex> n;
    std::vector<bool> degraded;
};

/// Full chain I → Im K → Re K → n on the given frequencies, Re K from the Im K function.
inline DielectricFunction dielectric_function(const MolecularSpectrum& spec, const MediumSpec& medium,
                                              const std::vector<double>& omega, KKOptions opt = {}) {
    spec.validate();
    medium.validate();
    if (omega.empty()) throw std::invalid_argument("dielectric_function: empty frequency list");
    for (const auto& ln : spec.lines) {
        const double c = std::abs(spec.frequency(ln, medium.hbar));
        if (c > 0.0) opt.breakpoints.push_back(c);
    }
    auto f = [&](double w) { return w > 0.0 ? im_K(spec, medium, w) : 0.0; };
    DielectricFunction out;
    for (double w : omega) {
        if (!(w > 0.0)) throw std::invalid_argument("dielectric_function: frequencies must be > 0");
        out.omega.push_back(w);
        out.spectral.push_back(spectral_density(spec, medium.beta, w, medium.hbar));
        const double im = f(w);
        const KKValue re = re_K(f, w, opt);
        out.im_K.push_back(im);
        out.re_K.push_back(re.value);
        out.n.push_back(refractive_index(Complex(re.value, im)));
        out.degraded.push_back(re.degraded);
    }
    return out;
}

class SpectrumParseError : public std::invalid_argument {
public:
    SpectrumParseError(std::size_t line, const std::string& what)
        : std::invalid_argument("spectrum line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads
///
///     level <index> <energy>
///     line  <l> <m> <|J_lm|²> <half-width>
///
/// with comma or whitespace separators and '#' comments. Level indices must be 0..n−1.
inline MolecularSpectrum parse_spectrum(std::istream& in) {
    MolecularSpectrum spec;
    std::vector<std::pair<std::size_t, double>> levels;
    std::vector<std::pair<std::size_t, SpectralLine>> lines;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::replace(raw.begin(), raw.end(), ',', ' ');
        std::istringstream ss(raw);
        std::string kind;
        if (!(ss >> kind)) continue;
        auto need = [&](auto& v, const char* what) {
            if (!(ss >> v)) throw SpectrumParseError(lineno, std::string("missing or malformed ") + what);
        };
        if (kind == "level") {
            long long idx = 0;
            double e = 0.0;
            need(idx, "level index");
            need(e, "energy");
            if (idx < 0) throw SpectrumParseError(lineno, "negative level index");
            levels.emplace_back(static_cast<std::size_t>(idx), e);
        } else if (kind == "line") {
            long long l = 0, m = 0;
            SpectralLine ln;
            need(l, "l");
            need(m, "m");
            need(ln.J2, "|J|^2");
            need(ln.width, "width");
            if (l < 0 || m < 0) throw SpectrumParseError(lineno, "negative level index");
            if (ln.J2 < 0.0) throw SpectrumParseError(lineno, "|J|^2 must be non-negative");
            if (!(ln.width > 0.0)) throw SpectrumParseError(lineno, "width must be positive");
            ln.l = static_cast<std::size_t>(l);
            ln.m = static_cast<std::size_t>(m);
            lines.emplace_back(lineno, ln);
        } else {
            throw SpectrumParseError(lineno, "unknown record '" + kind + "' (expected level or line)");
        }
        std::string extra;
        if (ss >> extra) throw SpectrumParseError(lineno, "unexpected trailing field '" + extra + "'");
    }
    spec.energies.assign(levels.size(), 0.0);
    std::vector<bool> seen(levels.size(), false);
    for (const auto& [idx, e] : levels) {
        if (idx >= levels.size() || seen[idx])
            throw std::invalid_argument("spectrum: level indices must be unique and run 0.." +
                                        std::to_string(levels.size() - 1));
        seen[idx] = true;
        spec.energies[idx] = e;
    }
    for (const auto& [at, ln] : lines) {
        if (ln.l >= levels.size() || ln.m >= levels.size())
            throw SpectrumParseError(at, "line refers to an undeclared level");
        spec.lines.push_back(ln);
    }
    if (spec.energies.empty()) throw std::invalid_argument("spectrum: no levels declared");
    return spec;
}

}  // namespace qhalo::medium
