#include "qci/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qci/error.hpp"

namespace qci {
namespace {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
        std::ostringstream os;
        os << origin_;
        if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
        os << ": " << msg;
        throw ConfigError(os.str());
    }

    void require_map(const YAML::Node& node, const std::string& where) const {
        if (!node.IsMap()) fail(node, where + " must be a mapping");
    }

    void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) const {
        require_map(node, where);
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
        }
    }

    template <class T>
    T scalar(const YAML::Node& node, const std::string& field) const {
        if (!node.IsScalar()) fail(node, field + " must be a scalar");
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, "invalid value for " + field);
        }
    }

    std::vector<double> list(const YAML::Node& node, const std::string& field) const {
        if (!node.IsSequence()) fail(node, field + " must be a list");
        std::vector<double> out;
        for (const auto& v : node) out.push_back(scalar<double>(v, field));
        return out;
    }

    Vec vec(const YAML::Node& node, const std::string& field) const {
        const auto v = list(node, field);
        return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

private:
    std::string origin_;
};

void parse_system(const Reader& r, const YAML::Node& n, SystemSpec& s) {
    r.check_keys(n, "system", {"kind", "dim", "profile", "liouville"});
    if (n["kind"]) s.kind = r.scalar<std::string>(n["kind"], "system.kind");
    if (s.kind != "torus" && s.kind != "surface_of_revolution" && s.kind != "liouville_torus")
        r.fail(n["kind"], "system.kind must be torus, surface_of_revolution or liouville_torus");
    if (n["dim"]) s.dim = r.scalar<int>(n["dim"], "system.dim");
    if (s.kind == "torus" && (s.dim < 1 || s.dim > 4)) r.fail(n["dim"], "torus dimension must be 1..4");
    if (s.kind != "torus") s.dim = 2;
    if (const auto p = n["profile"]) {
        r.check_keys(p, "system.profile", {"name", "params", "table"});
        if (p["name"]) s.profile = r.scalar<std::string>(p["name"], "system.profile.name");
        if (p["params"]) s.params = r.list(p["params"], "system.profile.params");
        if (p["table"]) s.table = r.scalar<std::string>(p["table"], "system.profile.table");
    }
    if (const auto l = n["liouville"]) {
        r.check_keys(l, "system.liouville", {"u1", "u2"});
        if (l["u1"]) {
            const auto v = r.list(l["u1"], "system.liouville.u1");
            if (v.size() != 2) r.fail(l["u1"], "system.liouville.u1 needs [mean, amplitude]");
            s.liouville.u1_mean = v[0];
            s.liouville.u1_amp = v[1];
        }
        if (l["u2"]) {
            const auto v = r.list(l["u2"], "system.liouville.u2");
            if (v.size() != 2) r.fail(l["u2"], "system.liouville.u2 needs [mean, amplitude]");
            s.liouville.u2_mean = v[0];
            s.liouville.u2_amp = v[1];
        }
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    Reader r(origin);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    r.check_keys(root, "config",
                 {"schema", "id", "target", "system", "band", "cutoff", "c_bar", "lambda", "points", "pairs",
                  "offdiag_mode", "region", "ray", "expect", "mollifier", "spectrum", "cluster", "geometry",
                  "output", "seed", "threads"});
    ExperimentConfig c;
    c.source = origin;
    if (!root["schema"]) r.fail(root, "missing schema version");
    c.schema = r.scalar<int>(root["schema"], "schema");
    if (c.schema != 1) r.fail(root["schema"], "unsupported schema version " + std::to_string(c.schema));
    if (root["id"]) c.id = r.scalar<std::string>(root["id"], "id");
    if (root["target"]) c.target = r.scalar<std::string>(root["target"], "target");
    static const std::set<std::string> targets{"pointwise_diag", "pointwise_offdiag", "integrated",
                                               "cluster",        "smoothed_measure",  "tauberian",
                                               "spectrum",       "geometry"};
    if (!targets.count(c.target)) r.fail(root["target"], "unknown target '" + c.target + "'");
    if (root["system"]) parse_system(r, root["system"], c.system);
    const int n = c.system.dim;

    if (const auto b = root["band"]) {
        const auto v = r.list(b, "band");
        if (v.size() != 2 || !(v[0] < v[1])) r.fail(b, "band must be [sigma_lo, sigma_hi] with sigma_lo < sigma_hi");
        c.has_band = true;
        c.band_lo = v[0];
        c.band_hi = v[1];
    }
    if (const auto k = root["cutoff"]) {
        r.check_keys(k, "cutoff", {"kind", "c_min", "c_max", "width", "axis", "half_angle"});
        if (k["kind"]) c.cutoff.kind = r.scalar<std::string>(k["kind"], "cutoff.kind");
        if (c.cutoff.kind != "none" && c.cutoff.kind != "sor_ratio" && c.cutoff.kind != "torus_cone")
            r.fail(k["kind"], "cutoff.kind must be none, sor_ratio or torus_cone");
        if (k["c_min"]) c.cutoff.c_min = r.scalar<double>(k["c_min"], "cutoff.c_min");
        if (k["c_max"]) c.cutoff.c_max = r.scalar<double>(k["c_max"], "cutoff.c_max");
        if (k["width"]) c.cutoff.width = r.scalar<double>(k["width"], "cutoff.width");
        if (k["axis"]) c.cutoff.axis = r.vec(k["axis"], "cutoff.axis");
        if (k["half_angle"]) c.cutoff.half_angle = r.scalar<double>(k["half_angle"], "cutoff.half_angle");
        if (c.cutoff.kind == "torus_cone" && c.cutoff.axis.size() != n)
            r.fail(k, "cutoff.axis must have " + std::to_string(n) + " components");
    }
    if (const auto cb = root["c_bar"]) {
        c.c_bar = r.vec(cb, "c_bar");
        if (c.c_bar.size() != n) r.fail(cb, "c_bar must have " + std::to_string(n) + " components");
        for (Eigen::Index i = 0; i < c.c_bar.size(); ++i)
            if (c.c_bar[i] == 0.0) r.fail(cb, "c̄ components must be nonzero");
        if (std::abs(c.c_bar.norm() - 1.0) > 1e-9) r.fail(cb, "c_bar must be a unit vector");
        c.c_bar.normalize();
    }
    if (const auto l = root["lambda"]) {
        c.lambdas = r.list(l, "lambda");
        for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
            if (!(c.lambdas[i] > 0.0)) r.fail(l, "lambda values must be positive");
            if (i && !(c.lambdas[i] > c.lambdas[i - 1])) r.fail(l, "lambda grid must be strictly increasing");
        }
    }
    if (const auto p = root["points"]) {
        if (!p.IsSequence()) r.fail(p, "points must be a list of points");
        for (const auto& q : p) {
            Vec v = r.vec(q, "points");
            if (v.size() != n) r.fail(q, "each point needs " + std::to_string(n) + " coordinates");
            c.points.push_back(v);
        }
    }
    if (const auto p = root["pairs"]) {
        r.check_keys(p, "pairs", {"count", "separation"});
        if (p["count"]) c.pair_count = r.scalar<int>(p["count"], "pairs.count");
        if (p["separation"]) c.pair_separation = r.scalar<double>(p["separation"], "pairs.separation");
        if (c.pair_count < 1) r.fail(p, "pairs.count must be positive");
    }
    if (const auto m = root["offdiag_mode"]) {
        c.offdiag_mode = r.scalar<std::string>(m, "offdiag_mode");
        if (c.offdiag_mode != "full_phase" && c.offdiag_mode != "linearized")
            r.fail(m, "offdiag_mode must be full_phase or linearized");
    }
    if (const auto g = root["region"]) {
        r.check_keys(g, "region", {"kind", "axis", "half_angle"});
        if (g["kind"]) c.region.kind = r.scalar<std::string>(g["kind"], "region.kind");
        if (c.region.kind != "box" && c.region.kind != "ball" && c.region.kind != "cone" && c.region.kind != "p1_ball")
            r.fail(g["kind"], "region.kind must be box, ball, cone or p1_ball");
        if (g["axis"]) c.region.axis = r.vec(g["axis"], "region.axis");
        if (g["half_angle"]) c.region.half_angle = r.scalar<double>(g["half_angle"], "region.half_angle");
        if (c.region.kind == "cone" && c.region.axis.size() != n)
            r.fail(g, "region.axis must have " + std::to_string(n) + " components");
    }
    if (const auto v = root["ray"]) {
        c.ray = r.vec(v, "ray");
        if (c.ray.size() != n || c.ray.norm() == 0.0) r.fail(v, "ray must be a nonzero vector of dimension " + std::to_string(n));
    }
    if (const auto e = root["expect"]) {
        c.expect = r.scalar<std::string>(e, "expect");
        if (c.expect != "bounded" && c.expect != "decay") r.fail(e, "expect must be bounded or decay");
    }
    if (const auto m = root["mollifier"]) {
        r.check_keys(m, "mollifier", {"delta0"});
        if (m["delta0"]) c.delta0 = r.scalar<double>(m["delta0"], "mollifier.delta0");
        if (!(c.delta0 > 0.0)) r.fail(m, "mollifier.delta0 must be positive");
    }
    if (const auto s = root["spectrum"]) {
        r.check_keys(s, "spectrum", {"grid_size", "lam_max", "richardson", "m_cap", "probes"});
        if (s["grid_size"]) c.grid_size = r.scalar<int>(s["grid_size"], "spectrum.grid_size");
        if (s["lam_max"]) c.lam_max = r.scalar<double>(s["lam_max"], "spectrum.lam_max");
        if (s["richardson"]) c.richardson = r.scalar<bool>(s["richardson"], "spectrum.richardson");
        if (s["m_cap"]) c.m_cap = r.scalar<int>(s["m_cap"], "spectrum.m_cap");
        if (s["probes"]) c.probes = r.list(s["probes"], "spectrum.probes");
        if (c.grid_size < 256) r.fail(s, "spectrum.grid_size must be at least 256");
    }
    if (const auto k = root["cluster"]) {
        r.check_keys(k, "cluster", {"boxes"});
        if (k["boxes"]) c.cluster_boxes = r.scalar<int>(k["boxes"], "cluster.boxes");
        if (c.cluster_boxes < 1) r.fail(k, "cluster.boxes must be positive");
    }
    if (const auto g = root["geometry"]) {
        r.check_keys(g, "geometry", {"cells", "phi_cells", "refine"});
        if (g["cells"]) c.geometry_cells = r.scalar<int>(g["cells"], "geometry.cells");
        if (g["phi_cells"]) c.geometry_phi_cells = r.scalar<int>(g["phi_cells"], "geometry.phi_cells");
        if (g["refine"]) c.geometry_refine = r.scalar<int>(g["refine"], "geometry.refine");
    }
    if (const auto o = root["output"]) {
        r.check_keys(o, "output", {"dir"});
        if (o["dir"]) c.output_dir = r.scalar<std::string>(o["dir"], "output.dir");
    }
    if (root["seed"]) c.seed = r.scalar<std::uint64_t>(root["seed"], "seed");
    if (root["threads"]) c.threads = r.scalar<int>(root["threads"], "threads");

    const bool needs_c = c.target == "pointwise_diag" || c.target == "pointwise_offdiag" || c.target == "tauberian" ||
                         (c.target == "integrated" && c.region.kind == "box");
    if (needs_c && c.c_bar.size() == 0) r.fail(root, "target " + c.target + " needs c_bar");
    const bool needs_lambda = c.target != "spectrum" && c.target != "geometry";
    if (needs_lambda && c.lambdas.empty()) r.fail(root, "target " + c.target + " needs a lambda grid");
    if (c.target == "spectrum" && !(c.lam_max > 0.0)) r.fail(root, "target spectrum needs spectrum.lam_max > 0");
    if ((c.target == "smoothed_measure" || c.target == "cluster") && c.ray.size() == 0)
        r.fail(root, "target " + c.target + " needs a ray");
    if (c.system.kind == "surface_of_revolution" && c.has_band)
        for (const auto& p : c.points)
            if (p[0] < c.band_lo || p[0] > c.band_hi) r.fail(root["points"], "point outside the band");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

ModelSystem build_system(const SystemSpec& spec) {
    if (spec.kind == "torus") return make_torus(spec.dim);
    if (spec.kind == "liouville_torus") return make_liouville_torus(spec.liouville);
    if (!spec.table.empty()) return make_surface_of_revolution(load_profile_table(spec.table));
    return make_surface_of_revolution(builtin_profile(spec.profile, spec.params));
}

CutoffSymbol build_cutoff(const CutoffSpec& spec) {
    if (spec.kind == "sor_ratio") return CutoffSymbol::sor_ratio(spec.c_min, spec.c_max, spec.width);
    if (spec.kind == "torus_cone") return CutoffSymbol::torus_cone(spec.axis, spec.half_angle, spec.width);
    return CutoffSymbol::none();
}

SpectralRegion build_region(const ExperimentConfig& cfg, const ModelSystem& system, double lambda) {
    const int n = system.dim();
    const auto& r = cfg.region;
    if (r.kind == "box") return SpectralRegion::box(lambda, cfg.c_bar);
    if (r.kind == "ball") return SpectralRegion::ball(n, lambda);
    if (r.kind == "cone") return SpectralRegion::cone(r.axis, r.half_angle, lambda);
    if (system.kind() != ModelKind::SurfaceOfRevolution)
        throw ConfigError("region p1_ball applies to surfaces of revolution");
    // |m| <= a_max lambda_1 on every eigenvalue, so the window holds exactly {lambda_1 <= lambda}
    const double m = std::floor(system.profile().a_max() * lambda) + 0.5;
    Vec lo(2), hi(2);
    lo << -lambda, -m;
    hi << lambda, m;
    return SpectralRegion::window(lo, hi);
}

}  // namespace qci
