#include "ulab/state_space.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"

namespace ulab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(const WaveFunction& a, const WaveFunction& b)
{
    if (!(a.grid() == b.grid())) throw std::invalid_argument("mismatched grids");
}

std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct DirectionPhase {
    std::array<double, 3> linear{};
    std::array<double, 6> quadratic{};

    explicit DirectionPhase(std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        // mt19937_64 output is fully specified, so this mapping is portable.
        auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
        for (double& a : linear) a = uniform();
        for (double& b : quadratic) b = uniform();
    }

    double operator()(const Vec3& p) const
    {
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        if (r == 0.0) return 0.0;
        const Vec3 u{p[0] / r, p[1] / r, p[2] / r};
        double phase = 0.0;
        for (int j = 0; j < 3; ++j) phase += linear[j] * u[j];
        int q = 0;
        for (int j = 0; j < 3; ++j) {
            for (int k = j; k < 3; ++k) phase += quadratic[q++] * u[j] * u[k];
        }
        return phase;
    }
};

}  // namespace

const char* to_string(Representation rep)
{
    return rep == Representation::position ? "position" : "momentum";
}

double GridSpec::dp() const { return kTwoPi * hbar / box_length; }

double GridSpec::cell_volume(Representation rep) const
{
    const double h = rep == Representation::position ? dx() : dp();
    return h * h * h;
}

GridSpec build_grid(int n, double box_length, double hbar)
{
    if (n < 8) throw std::invalid_argument("grid needs at least 8 points per axis");
    if (n % 2 != 0) throw std::invalid_argument("odd n: momentum lattice centering needs even n");
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw std::invalid_argument("box length must be positive");
    }
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("hbar must be positive");
    return GridSpec{n, box_length, hbar};
}

GridSpec reference_grid() { return build_grid(96, 40.0, 1.0); }

WaveFunction::WaveFunction(GridSpec grid, Representation rep, std::vector<cplx> amplitudes)
    : grid_(grid), rep_(rep), amp_(std::move(amplitudes))
{
    if (amp_.size() != grid_.size()) throw std::invalid_argument("amplitude array does not match grid");
}

double WaveFunction::norm() const
{
    double sum = 0.0;
    for (const cplx& a : amp_) sum += std::norm(a);
    return std::sqrt(sum * grid_.cell_volume(rep_));
}

WaveFunction transform(const WaveFunction& f, Representation target)
{
    if (f.rep() == target) return f;
    const GridSpec& g = f.grid();
    const double prefactor = std::pow(kTwoPi * g.hbar, -1.5);
    // Lattice offsets x_0 = -L/2 and p_0 = -n/2 dp turn into alternating signs
    // on both sides of a plain DFT; (-1)^(3n/2) = (-1)^(n/2) for even n.
    const double centering = (g.n / 2) % 2 == 0 ? 1.0 : -1.0;
    std::vector<cplx> data(f.amplitudes().size());
    if (target == Representation::momentum) {
        detail::fft3d(f.amplitudes(), data, g.n, detail::FftDirection::forward, true, 1.0,
                      centering * prefactor * g.cell_volume(Representation::position));
    } else {
        detail::fft3d(f.amplitudes(), data, g.n, detail::FftDirection::backward, true, centering,
                      prefactor * g.cell_volume(Representation::momentum));
    }
    return WaveFunction(g, target, std::move(data));
}

WaveFunction transform(WaveFunction&& f, Representation target)
{
    if (f.rep() == target) return std::move(f);
    return transform(static_cast<const WaveFunction&>(f), target);
}

namespace {

// g itself when it is already in rep, otherwise a transformed copy held in tmp.
const WaveFunction& in_rep(const WaveFunction& g, Representation rep, std::optional<WaveFunction>& tmp)
{
    if (g.rep() == rep) return g;
    tmp.emplace(transform(g, rep));
    return *tmp;
}

}  // namespace

cplx inner_product(const WaveFunction& f, const WaveFunction& g)
{
    require_same_grid(f, g);
    std::optional<WaveFunction> tmp;
    const WaveFunction& gg = in_rep(g, f.rep(), tmp);
    cplx sum{0.0, 0.0};
    auto a = f.amplitudes();
    auto b = gg.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * std::conj(b[i]);
    return sum * f.grid().cell_volume(f.rep());
}

WaveFunction operator+(const WaveFunction& a, const WaveFunction& b)
{
    require_same_grid(a, b);
    std::vector<cplx> out(a.amplitudes().begin(), a.amplitudes().end());
    std::optional<WaveFunction> tmp;
    const WaveFunction& bb = in_rep(b, a.rep(), tmp);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bb[i];
    return WaveFunction(a.grid(), a.rep(), std::move(out));
}

WaveFunction operator-(const WaveFunction& a, const WaveFunction& b)
{
    require_same_grid(a, b);
    std::vector<cplx> out(a.amplitudes().begin(), a.amplitudes().end());
    std::optional<WaveFunction> tmp;
    const WaveFunction& bb = in_rep(b, a.rep(), tmp);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bb[i];
    return WaveFunction(a.grid(), a.rep(), std::move(out));
}

WaveFunction operator*(cplx c, const WaveFunction& f)
{
    std::vector<cplx> out(f.amplitudes().begin(), f.amplitudes().end());
    for (cplx& v : out) v *= c;
    return WaveFunction(f.grid(), f.rep(), std::move(out));
}

// --- StateSpec ----------------------------------------------------------------

std::string StateSpec::describe() const
{
    std::string out;
    if (const auto* g = std::get_if<GaussianParams>(&shape)) {
        out = "gaussian(p0=[" + format_number(g->p0[0]) + "," + format_number(g->p0[1]) + "," +
              format_number(g->p0[2]) + "],sigma=" + format_number(g->sigma);
    } else {
        const auto& b = std::get<AnnularBumpParams>(shape);
        out = "annular_bump(r_in=" + format_number(b.r_in) + ",r_out=" + format_number(b.r_out);
    }
    if (seed) out += ",seed=" + std::to_string(*seed);
    return out + ")";
}

void to_json(nlohmann::json& j, const StateSpec& spec)
{
    if (const auto* g = std::get_if<GaussianParams>(&spec.shape)) {
        j = {{"family", "gaussian"}, {"p0", g->p0}, {"sigma", g->sigma}};
    } else {
        const auto& b = std::get<AnnularBumpParams>(spec.shape);
        j = {{"family", "annular_bump"}, {"r_in", b.r_in}, {"r_out", b.r_out}};
    }
    if (spec.seed) j["seed"] = *spec.seed;
}

void from_json(const nlohmann::json& j, StateSpec& spec)
{
    if (!j.is_object()) throw std::invalid_argument("state spec must be a JSON object");
    auto number = [&j](const char* key) {
        if (!j.contains(key) || !j.at(key).is_number()) {
            throw std::invalid_argument(std::string("state spec: missing numeric field '") + key + "'");
        }
        return j.at(key).get<double>();
    };
    if (!j.contains("family") || !j.at("family").is_string()) {
        throw std::invalid_argument("state spec: missing 'family'");
    }
    const auto family = j.at("family").get<std::string>();
    if (family == "gaussian") {
        GaussianParams g;
        const auto& p0 = j.contains("p0") ? j.at("p0") : nlohmann::json();
        if (!p0.is_array() || p0.size() != 3) throw std::invalid_argument("state spec: 'p0' must be a 3-vector");
        for (int k = 0; k < 3; ++k) {
            if (!p0[k].is_number()) throw std::invalid_argument("state spec: 'p0' must be numeric");
            g.p0[k] = p0[k].get<double>();
        }
        g.sigma = number("sigma");
        spec.shape = g;
    } else if (family == "annular_bump") {
        spec.shape = AnnularBumpParams{number("r_in"), number("r_out")};
    } else {
        throw std::invalid_argument("state spec: unknown family '" + family + "'");
    }
    spec.seed.reset();
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw std::invalid_argument("state spec: 'seed' must be a non-negative integer");
        spec.seed = j.at("seed").get<std::uint64_t>();
    }
}

WaveFunction synthesize_state(const GridSpec& grid, const StateSpec& spec)
{
    const double nyquist = grid.nyquist();
    std::function<double(const Vec3&)> profile;
    if (const auto* g = std::get_if<GaussianParams>(&spec.shape)) {
        if (!(g->sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
        if (g->sigma < 0.5 * grid.dp()) throw std::invalid_argument("gaussian sigma below lattice resolution");
        for (double c : g->p0) {
            if (std::abs(c) + 4.0 * g->sigma > nyquist) {
                throw std::invalid_argument("gaussian support extends beyond the momentum lattice");
            }
        }
        const GaussianParams params = *g;
        profile = [params](const Vec3& p) {
            double d2 = 0.0;
            for (int k = 0; k < 3; ++k) d2 += (p[k] - params.p0[k]) * (p[k] - params.p0[k]);
            return std::exp(-d2 / (2.0 * params.sigma * params.sigma));
        };
    } else {
        const auto b = std::get<AnnularBumpParams>(spec.shape);
        if (!(b.r_in >= 0.0) || !(b.r_out > b.r_in)) {
            throw std::invalid_argument("annular bump needs 0 <= r_in < r_out");
        }
        if (b.r_out > nyquist * (1.0 + 1e-12)) {
            throw std::invalid_argument("annular bump support extends beyond the momentum lattice");
        }
        profile = [b](const Vec3& p) {
            const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            const double u = (2.0 * r - b.r_in - b.r_out) / (b.r_out - b.r_in);
            if (!(std::abs(u) < 1.0)) return 0.0;
            return std::exp(-1.0 / (1.0 - u * u));
        };
    }

    std::optional<DirectionPhase> phase;
    if (spec.seed) phase.emplace(*spec.seed);

    std::vector<cplx> amp(grid.size());
    std::size_t idx = 0;
    for (int a = 0; a < grid.n; ++a) {
        for (int b = 0; b < grid.n; ++b) {
            for (int c = 0; c < grid.n; ++c, ++idx) {
                const Vec3 p{grid.momentum(a), grid.momentum(b), grid.momentum(c)};
                const double mag = profile(p);
                amp[idx] = phase ? std::polar(mag, (*phase)(p)) : cplx(mag, 0.0);
            }
        }
    }
    WaveFunction raw(grid, Representation::momentum, std::move(amp));
    const double norm = raw.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("state has no support on the lattice");
    return cplx(1.0 / norm, 0.0) * raw;
}

ComplianceReport domain_compliance(const WaveFunction& f, double p_min, double edge_tol)
{
    const GridSpec& g = f.grid();
    const WaveFunction mom = transform(f, Representation::momentum);
    const WaveFunction pos = transform(f, Representation::position);
    const double norm2 = [&] {
        double s = 0.0;
        for (const cplx& a : mom.amplitudes()) s += std::norm(a);
        return s * g.cell_volume(Representation::momentum);
    }();

    auto on_edge = [&g](int k) { return k < 2 || k >= g.n - 2; };
    double near_zero = 0.0;
    double mom_edge = 0.0;
    double pos_edge = 0.0;
    std::size_t idx = 0;
    for (int a = 0; a < g.n; ++a) {
        for (int b = 0; b < g.n; ++b) {
            for (int c = 0; c < g.n; ++c, ++idx) {
                const double pa = g.momentum(a), pb = g.momentum(b), pc = g.momentum(c);
                const double w = std::norm(mom[idx]);
                if (pa * pa + pb * pb + pc * pc < p_min * p_min) near_zero += w;
                if (on_edge(a) || on_edge(b) || on_edge(c)) {
                    mom_edge += w;
                    pos_edge += std::norm(pos[idx]);
                }
            }
        }
    }
    ComplianceReport report;
    const double scale = norm2 > 0.0 ? 1.0 / norm2 : 0.0;
    report.mass_near_zero = near_zero * g.cell_volume(Representation::momentum) * scale;
    report.mass_at_edges = std::max(mom_edge * g.cell_volume(Representation::momentum),
                                    pos_edge * g.cell_volume(Representation::position)) *
                           scale;
    report.compliant = report.mass_near_zero < edge_tol && report.mass_at_edges < edge_tol;
    return report;
}

}  // namespace ulab
