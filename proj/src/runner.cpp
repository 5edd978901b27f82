#include "runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "error.hpp"
#include "expr.hpp"
#include "funcspace.hpp"
#include "grid.hpp"
#include "operators.hpp"
#include "probes.hpp"

namespace degenkit {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
    fail(ErrorKind::Config, "config " + where + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) config_error(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) config_error(where + "." + key, "missing");
    return *it;
}

double as_double(const json& v, const std::string& where) {
    if (!v.is_number()) config_error(where, "expected a number");
    return v.get<double>();
}

long long as_int(const json& v, const std::string& where) {
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    config_error(where, "expected an integer");
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) config_error(where, "expected a string");
    return v.get<std::string>();
}

// ---------------------------------------------------------------------------
// normalization: fills defaults so the effective config is explicit

json normalize_norm(const json& v, const std::string& where) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "Linf" || s == "Linfinity") return json{{"type", "lp"}, {"p", "inf"}};
        if (s.size() > 1 && s[0] == 'L') {
            double p = 0.0;
            const char* first = s.data() + 1;
            const char* last = s.data() + s.size();
            auto [ptr, ec] = std::from_chars(first, last, p);
            if (ec == std::errc() && ptr == last) return json{{"type", "lp"}, {"p", p}};
        }
        config_error(where, "unknown norm '" + s + "' (use L<p>, Linf or an object)");
    }
    if (!v.is_object()) config_error(where, "expected a norm string or object");
    const std::string type = as_string(field(v, "type", where), where + ".type");
    if (type == "lp") {
        const json& p = field(v, "p", where);
        if (p.is_string()) {
            if (p.get<std::string>() != "inf") config_error(where + ".p", "expected a number or \"inf\"");
            return json{{"type", "lp"}, {"p", "inf"}};
        }
        return json{{"type", "lp"}, {"p", as_double(p, where + ".p")}};
    }
    if (type == "orlicz") {
        return json{{"type", "orlicz"}, {"young", as_string(field(v, "young", where), where + ".young")}};
    }
    config_error(where + ".type", "expected \"lp\" or \"orlicz\"");
}

json normalize_function(const json& v, const std::string& where) {
    if (v.is_number()) return json{{"type", "constant"}, {"value", v.get<double>()}};
    if (v.is_string()) return json{{"type", "expression"}, {"expr", v.get<std::string>()}};
    if (!v.is_object()) config_error(where, "expected a number, expression string or object");
    const std::string type = as_string(field(v, "type", where), where + ".type");
    if (type == "constant") {
        return json{{"type", "constant"}, {"value", as_double(field(v, "value", where), where + ".value")}};
    }
    if (type == "expression") {
        return json{{"type", "expression"}, {"expr", as_string(field(v, "expr", where), where + ".expr")}};
    }
    if (type == "step") {
        const json& iv = field(v, "interval", where);
        if (!iv.is_array() || iv.size() != 2) config_error(where + ".interval", "expected [lo, hi]");
        json out{{"type", "step"},
                 {"interval", {as_double(iv[0], where + ".interval[0]"), as_double(iv[1], where + ".interval[1]")}},
                 {"value", as_double(field(v, "value", where), where + ".value")},
                 {"otherwise", 0.0}};
        if (v.contains("otherwise")) out["otherwise"] = as_double(v["otherwise"], where + ".otherwise");
        return out;
    }
    config_error(where + ".type", "expected \"constant\", \"step\" or \"expression\"");
}

// parameter kinds for the registry
enum class ParamKind { Number, Integer, Radii, Function };

struct ParamDef {
    std::string name;
    ParamKind kind;
    std::optional<json> fallback;  // absent: required
};

struct ProbeContext {
    IntegralOperator op;
    GridFunction x0;
    NormSpec ns_x;
    NormSpec ns_y;
    std::uint64_t seed;
    const json& params;
    GridPtr grid;
};

struct ProbeOutput {
    Verdict verdict = Verdict::NoWitnessFound;
    json scalars = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

GridFunction build_function(const json& spec, const GridPtr& grid, const std::string& where);

double num(const ProbeContext& c, const char* name) { return c.params.at(name).get<double>(); }
long long integer(const ProbeContext& c, const char* name) { return c.params.at(name).get<long long>(); }
std::vector<double> radii(const ProbeContext& c, const char* name) {
    return c.params.at(name).get<std::vector<double>>();
}

std::vector<double> ratio_row(double p, double v) { return {p, v}; }

ProbeOutput run_frechet(const ProbeContext& c) {
    const auto r = frechet_residual(c.op, c.x0, c.ns_x, c.ns_y, num(c, "amplitude"),
                                    static_cast<int>(integer(c, "levels")), num(c, "floor"));
    ProbeOutput out;
    out.verdict = r.verdict;
    out.columns = {"parameter", "value"};
    for (std::size_t k = 0; k < r.curve.value.size(); ++k) out.rows.push_back(ratio_row(r.curve.parameter[k], r.curve.value[k]));
    out.scalars["final_ratio"] = r.curve.value.back();
    out.scalars["floor"] = r.floor;
    out.scalars["grid_cells"] = r.grid_cells;
    return out;
}

ProbeOutput run_lipschitz_local(const ProbeContext& c) {
    const double rad = num(c, "r");
    const double est = lipschitz_local(c.op, c.x0, rad, c.ns_x, c.ns_y, static_cast<int>(integer(c, "trials")), c.seed);
    Verdict v = Verdict::NoWitnessFound;
    if (!c.params.at("bound").is_null()) {
        v = est <= c.params.at("bound").get<double>() ? Verdict::BoundSatisfied : Verdict::BoundViolated;
    }
    ProbeOutput out;
    out.verdict = v;
    out.columns = {"parameter", "value"};
    out.rows.push_back(ratio_row(rad, est));
    out.scalars["lipschitz_estimate"] = est;
    return out;
}

ProbeOutput run_lipschitz_pointwise(const ProbeContext& c) {
    const GridFunction y1 = build_function(c.params.at("y1"), c.grid, "probe.parameters.y1");
    const GridFunction y2 = build_function(c.params.at("y2"), c.grid, "probe.parameters.y2");
    const double L1 = num(c, "L1");
    const auto r = lipschitz_pointwise(c.op, y1, y2, c.x0, L1);
    ProbeOutput out;
    out.verdict = r.max_excess <= 0.0 ? Verdict::BoundSatisfied : Verdict::BoundViolated;
    out.columns = {"parameter", "value"};
    out.rows.push_back(ratio_row(L1, r.max_excess));
    out.scalars["max_excess"] = r.max_excess;
    out.scalars["cell"] = r.cell;
    return out;
}

ProbeOutput run_lipschitz_transfer(const ProbeContext& c) {
    LipschitzParams p;
    p.tau = num(c, "tau");
    p.ell = num(c, "ell");
    p.L = num(c, "L");
    p.L2 = num(c, "L2");
    const double rad = num(c, "r");
    const auto r = lipschitz_transfer(c.op, c.x0, p, rad, static_cast<int>(integer(c, "trials")), c.seed, c.ns_x,
                                      c.ns_y, num(c, "tolerance"));
    ProbeOutput out;
    out.verdict = r.verdict;
    out.columns = {"parameter", "value"};
    out.rows.push_back(ratio_row(rad, r.max_violation));
    out.scalars["max_violation"] = r.max_violation;
    out.scalars["L1"] = p.L1();
    return out;
}

ProbeOutput run_local_mnc(const ProbeContext& c) {
    const auto k = static_cast<std::size_t>(integer(c, "k_budget"));
    const auto r = local_mnc_ratio(c.op, c.x0, c.ns_x, c.ns_y, radii(c, "radii"),
                                   static_cast<int>(integer(c, "samples_per_radius")), k, c.seed, k);
    const double floor = num(c, "floor");
    bool positive = true;
    for (double v : r.curve.value) positive = positive && v > floor;
    ProbeOutput out;
    out.verdict = positive ? Verdict::DegeneracyWitnessed : Verdict::NoWitnessFound;
    out.columns = {"parameter", "value", "k", "upper", "lower"};
    for (std::size_t i = 0; i < r.curve.value.size(); ++i) {
        out.rows.push_back({r.curve.parameter[i], r.curve.value[i], double(k), r.upper[i], r.curve.value[i]});
    }
    out.scalars["scalar_L"] = r.scalar_L;
    out.scalars["scalar_L_upper"] = r.scalar_L_upper;
    return out;
}

ProbeOutput run_darbo(const ProbeContext& c) {
    const auto r = darbo_growth(c.op, c.x0, c.ns_x, c.ns_y, radii(c, "radii"), static_cast<int>(integer(c, "trials")),
                                c.seed, num(c, "c"), num(c, "tolerance"),
                                static_cast<std::size_t>(integer(c, "k_net")));
    ProbeOutput out;
    out.verdict = r.verdict;
    out.columns = {"parameter", "value"};
    for (std::size_t i = 0; i < r.lhs.value.size(); ++i) out.rows.push_back(ratio_row(r.lhs.parameter[i], r.lhs.value[i]));
    out.scalars["rhs"] = r.rhs;
    out.scalars["f_upper"] = r.f_upper;
    out.scalars["d2g_upper"] = r.d2g_upper;
    out.scalars["growth_excess"] = r.growth_excess;
    return out;
}

ProbeOutput run_compactness(const ProbeContext& c) {
    const auto k = static_cast<std::size_t>(integer(c, "k_budget"));
    const double rad = num(c, "r");
    const auto r = compactness_probe(c.op, c.x0, c.ns_x, c.ns_y, rad, static_cast<int>(integer(c, "trials")), k,
                                     c.seed, num(c, "tolerance"));
    ProbeOutput out;
    out.verdict = r.verdict;
    out.columns = {"parameter", "value", "k", "upper", "lower"};
    out.rows.push_back({rad, r.alpha_lower, double(k), r.raw_lower, r.alpha_lower});
    out.scalars["alpha_lower"] = r.alpha_lower;
    out.scalars["raw_lower"] = r.raw_lower;
    out.scalars["d2g_tail"] = r.d2g_tail;
    return out;
}

struct ProbeEntry {
    ProbeInfo info;
    std::vector<ParamDef> params;
    std::function<ProbeOutput(const ProbeContext&)> run;
};

const std::vector<ProbeEntry>& entries() {
    static const std::vector<ProbeEntry> table = [] {
        std::vector<ProbeEntry> t;
        auto add = [&](std::string name, std::string anchor, std::vector<ParamDef> params, std::string columns,
                       std::function<ProbeOutput(const ProbeContext&)> run) {
            ProbeInfo info{std::move(name), std::move(anchor), {}, {}, std::move(columns)};
            for (const auto& p : params) (p.fallback ? info.optional : info.required).push_back(p.name);
            t.push_back({std::move(info), std::move(params), std::move(run)});
        };
        using K = ParamKind;
        add("frechet_residual", "Frechet residual of F along shrinking characteristic perturbations",
            {{"amplitude", K::Number, {}}, {"levels", K::Integer, {}}, {"floor", K::Number, json(1e-3)}},
            "parameter=mes(D_n),value=residual ratio", run_frechet);
        add("lipschitz_local", "sampled local Lipschitz constant of F on a ball",
            {{"r", K::Number, {}}, {"trials", K::Integer, {}}, {"bound", K::Number, json(nullptr)}},
            "parameter=r,value=estimate", run_lipschitz_local);
        add("lipschitz_pointwise", "pointwise Lipschitz excess of G(.,x0) on a pair",
            {{"y1", K::Function, {}}, {"y2", K::Function, {}}, {"L1", K::Number, {}}},
            "parameter=L1,value=max excess", run_lipschitz_pointwise);
        add("lipschitz_transfer", "(tau,ell) Lipschitz transfer inequality on sampled triples",
            {{"r", K::Number, {}},
             {"trials", K::Integer, {}},
             {"tau", K::Number, {}},
             {"ell", K::Number, {}},
             {"L", K::Number, json(0.0)},
             {"L2", K::Number, json(0.0)},
             {"tolerance", K::Number, json(1e-9)}},
            "parameter=r,value=max violation", run_lipschitz_transfer);
        add("local_mnc_ratio", "noncompactness ratio alpha(F(B_r(x0)))/r",
            {{"radii", K::Radii, {}},
             {"samples_per_radius", K::Integer, {}},
             {"k_budget", K::Integer, {}},
             {"floor", K::Number, json(1e-3)}},
            "parameter=r,value=lower/r,k,upper=upper/r,lower=lower/r", run_local_mnc);
        add("darbo_growth", "diameter growth of G(.,x0) against the Darbo bound",
            {{"radii", K::Radii, {}},
             {"trials", K::Integer, {}},
             {"c", K::Number, json(1.0)},
             {"tolerance", K::Number, json(0.05)},
             {"k_net", K::Integer, json(1)}},
            "parameter=r,value=diam/(2r)", run_darbo);
        add("compactness", "noncompactness of F(B_r(x0)) with compact D2G(x0,x0)",
            {{"r", K::Number, {}},
             {"trials", K::Integer, {}},
             {"k_budget", K::Integer, {}},
             {"tolerance", K::Number, json(1e-3)}},
            "parameter=r,value=alpha_lower,k,upper=raw lower,lower=alpha_lower", run_compactness);
        return t;
    }();
    return table;
}

const ProbeEntry& find_probe(const std::string& name) {
    for (const auto& e : entries()) {
        if (e.info.name == name) return e;
    }
    std::string names;
    for (const auto& e : entries()) names += (names.empty() ? "" : ", ") + e.info.name;
    config_error("probe.name", "unknown probe '" + name + "' (available: " + names + ")");
}

json normalize_params(const ProbeEntry& probe, const json& given) {
    const std::string where = "probe.parameters";
    if (!given.is_object()) config_error(where, "expected an object");
    for (auto it = given.begin(); it != given.end(); ++it) {
        bool known = false;
        for (const auto& p : probe.params) known = known || p.name == it.key();
        if (!known) config_error(where + "." + it.key(), "unknown parameter for probe " + probe.info.name);
    }
    json out = json::object();
    for (const auto& p : probe.params) {
        const std::string at = where + "." + p.name;
        if (!given.contains(p.name)) {
            if (!p.fallback) config_error(at, "missing");
            out[p.name] = *p.fallback;
            continue;
        }
        const json& v = given[p.name];
        switch (p.kind) {
            case ParamKind::Number:
                if (v.is_null() && p.fallback && p.fallback->is_null()) {
                    out[p.name] = nullptr;
                } else {
                    out[p.name] = as_double(v, at);
                }
                break;
            case ParamKind::Integer: out[p.name] = as_int(v, at); break;
            case ParamKind::Radii: {
                if (!v.is_array() || v.empty()) config_error(at, "expected a nonempty array of numbers");
                json arr = json::array();
                for (std::size_t k = 0; k < v.size(); ++k) arr.push_back(as_double(v[k], at + "[" + std::to_string(k) + "]"));
                out[p.name] = arr;
                break;
            }
            case ParamKind::Function: out[p.name] = normalize_function(v, at); break;
        }
    }
    return out;
}

json normalize(const json& config, const RunOverrides& ov) {
    if (!config.is_object()) config_error("", "top level must be an object");
    json eff;
    const json& g = field(config, "grid", "");
    json grid{{"n", as_int(field(g, "n", "grid"), "grid.n")}, {"refinements", 0}, {"total", 1.0}};
    if (g.contains("refinements")) grid["refinements"] = as_int(g["refinements"], "grid.refinements");
    if (g.contains("total")) grid["total"] = as_double(g["total"], "grid.total");
    if (ov.grid_n) grid["n"] = *ov.grid_n;
    if (ov.refinements) grid["refinements"] = *ov.refinements;
    if (grid["n"].get<long long>() < 1) config_error("grid.n", "must be at least 1");
    if (grid["refinements"].get<long long>() < 0 || grid["refinements"].get<long long>() > 20) {
        config_error("grid.refinements", "must be in [0, 20]");
    }
    if (!(grid["total"].get<double>() > 0.0)) config_error("grid.total", "must be positive");
    eff["grid"] = grid;

    json space{{"norm_x", json{{"type", "lp"}, {"p", 2.0}}}, {"norm_y", json{{"type", "lp"}, {"p", 2.0}}}};
    if (config.contains("space")) {
        const json& s = config["space"];
        if (!s.is_object()) config_error("space", "expected an object");
        if (s.contains("norm_x")) space["norm_x"] = normalize_norm(s["norm_x"], "space.norm_x");
        if (s.contains("norm_y")) space["norm_y"] = normalize_norm(s["norm_y"], "space.norm_y");
    }
    eff["space"] = space;

    const json& k = field(config, "kernels", "");
    if (!k.is_object()) config_error("kernels", "expected an object");
    json kernels = json::object();
    for (auto it = k.begin(); it != k.end(); ++it) {
        if (it.key() != "k0" && it.key() != "k1" && it.key() != "k2") {
            config_error("kernels." + it.key(), "unknown kernel slot (use k0, k1, k2)");
        }
        if (!it.value().is_null()) kernels[it.key()] = as_string(it.value(), "kernels." + it.key());
    }
    if (kernels.empty()) config_error("kernels", "at least one of k0, k1, k2 is required");
    eff["kernels"] = kernels;

    eff["base_point"] = config.contains("base_point") ? normalize_function(config["base_point"], "base_point")
                                                      : normalize_function(json(0.0), "base_point");

    const json& p = field(config, "probe", "");
    const std::string name = as_string(field(p, "name", "probe"), "probe.name");
    const ProbeEntry& entry = find_probe(name);
    eff["probe"] = json{{"name", name},
                        {"parameters", normalize_params(entry, p.contains("parameters") ? p["parameters"] : json::object())}};

    std::uint64_t seed = 0;
    if (config.contains("seed")) {
        const json& s = config["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            config_error("seed", "expected a nonnegative integer");
        }
        seed = s.get<std::uint64_t>();
    }
    if (ov.seed) seed = *ov.seed;
    eff["seed"] = seed;

    json output{{"report", ""}, {"csv", ""}};
    if (config.contains("output")) {
        const json& o = config["output"];
        if (!o.is_object()) config_error("output", "expected an object");
        if (o.contains("report")) output["report"] = as_string(o["report"], "output.report");
        if (o.contains("csv")) output["csv"] = as_string(o["csv"], "output.csv");
    }
    eff["output"] = output;
    return eff;
}

NormSpec build_norm(const json& spec, double total, const std::string& where) {
    if (spec["type"] == "lp") {
        if (spec["p"].is_string()) return NormSpec::linf();
        const double p = spec["p"].get<double>();
        if (!(p >= 1.0)) config_error(where + ".p", "must be at least 1");
        return NormSpec::lp(p);
    }
    try {
        return NormSpec::orlicz(YoungFunction::from_text(spec["young"].get<std::string>(), total));
    } catch (const ParseError& e) {
        throw ParseError(where + ".young: " + std::string(e.what()).substr(0, std::string(e.what()).rfind(" at byte")),
                         e.offset());
    } catch (const Error& e) {
        config_error(where + ".young", e.what());
    }
}

GridFunction build_function(const json& spec, const GridPtr& grid, const std::string& where) {
    const std::string type = spec["type"];
    if (type == "constant") return GridFunction::constant(grid, spec["value"].get<double>());
    if (type == "step") {
        const double lo = spec["interval"][0].get<double>();
        const double hi = spec["interval"][1].get<double>();
        const double in = spec["value"].get<double>();
        const double out = spec["otherwise"].get<double>();
        return GridFunction::sample(grid, [&](double t) { return (t >= lo && t <= hi) ? in : out; });
    }
    Expr e = [&] {
        try {
            return parse_expr(spec["expr"].get<std::string>(), VarSet::of("t"));
        } catch (const ParseError& err) {
            const std::string msg = err.what();
            throw ParseError(where + ".expr: " + msg.substr(0, msg.rfind(" at byte")), err.offset());
        }
    }();
    const CompiledExpr code(e);
    try {
        return GridFunction::sample(grid, [&](double t) { return code({t, 0.0, 0.0, 0.0}); });
    } catch (const Error& err) {
        config_error(where, err.what());
    }
}

KernelSpec build_kernels(const json& k) {
    KernelSpec spec;
    auto slot = [&](const char* name, VarSet vars) -> std::optional<Expr> {
        if (!k.contains(name)) return std::nullopt;
        try {
            return parse_expr(k[name].get<std::string>(), vars);
        } catch (const ParseError& err) {
            const std::string msg = err.what();
            throw ParseError(std::string("kernels.") + name + ": " + msg.substr(0, msg.rfind(" at byte")),
                             err.offset());
        }
    };
    spec.k0 = slot("k0", KernelSpec::k0_vars());
    spec.k1 = slot("k1", KernelSpec::k1_vars());
    spec.k2 = slot("k2", KernelSpec::k2_vars());
    return spec;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Config, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

const std::vector<ProbeInfo>& probe_registry() {
    static const std::vector<ProbeInfo> infos = [] {
        std::vector<ProbeInfo> v;
        for (const auto& e : entries()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

std::string list_probes_table() {
    std::ostringstream os;
    for (const auto& p : probe_registry()) {
        os << p.name << " | " << p.anchor << " | ";
        for (std::size_t i = 0; i < p.required.size(); ++i) os << (i ? "," : "") << p.required[i];
        os << '\n';
    }
    return os.str();
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

json parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), e.byte);
    }
    if (j.is_object() && j.contains("schema_version") && j.contains("config")) return j["config"];
    return j;
}

json load_config_file(const std::string& path) { return parse_config_text(read_file(path)); }

RunResult run_config(const json& config, const RunOverrides& overrides) {
    const json eff = normalize(config, overrides);

    const json& g = eff["grid"];
    GridPtr grid = Grid::uniform(g["n"].get<std::size_t>(), g["total"].get<double>());
    for (int i = 0; i < g["refinements"].get<int>(); ++i) grid = refine(grid).fine;

    const double total = grid->total_measure();
    const NormSpec ns_x = build_norm(eff["space"]["norm_x"], total, "space.norm_x");
    const NormSpec ns_y = build_norm(eff["space"]["norm_y"], total, "space.norm_y");
    const KernelSpec kernels = build_kernels(eff["kernels"]);
    const GridFunction x0 = build_function(eff["base_point"], grid, "base_point");
    const std::string name = eff["probe"]["name"];
    const ProbeEntry& entry = find_probe(name);
    const std::uint64_t seed = eff["seed"].get<std::uint64_t>();

    ProbeOutput out;
    try {
        const ProbeContext ctx{IntegralOperator(kernels, grid), x0, ns_x, ns_y, seed, eff["probe"]["parameters"], grid};
        out = entry.run(ctx);
    } catch (const Error& e) {
        throw Error(e.kind(), "probe " + name + ": " + e.what());
    }

    RunResult result;
    json curve = json::object();
    curve["columns"] = out.columns;
    curve["rows"] = json::array();
    std::ostringstream csv;
    for (std::size_t c = 0; c < out.columns.size(); ++c) csv << (c ? "," : "") << out.columns[c];
    csv << "\r\n";
    for (const auto& row : out.rows) {
        curve["rows"].push_back(row);
        for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << format_number(row[c]);
        csv << "\r\n";
    }

    json report;
    report["schema_version"] = kSchemaVersion;
    report["probe"] = name;
    report["verdict"] = to_string(out.verdict);
    report["seed"] = seed;
    report["config_digest"] = fnv1a_hex(eff.dump());
    report["config"] = eff;
    report["scalars"] = out.scalars;
    report["curve"] = curve;

    result.report = std::move(report);
    result.csv = csv.str();
    result.report_path = eff["output"]["report"];
    result.csv_path = eff["output"]["csv"];
    return result;
}

int exit_code_for(const std::exception& e) noexcept {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::Numeric:
            case ErrorKind::Domain: return 3;
            default: return 2;
        }
    }
    return 3;
}

}  // namespace degenkit
