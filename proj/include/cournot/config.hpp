#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cournot/model.hpp"
#include "cournot/schemes.hpp"

namespace cournot {

using nlohmann::json;

struct DomainConfig {
    int dim = 1;
    std::vector<std::array<double, 2>> bounds{{0.0, 16.0}};
    int n = 100;
};

struct MeasureConfig {
    std::string type = "gaussian_mixture";
    std::vector<GaussianComponent> components{{{3.0}, 0.8, 0.5}, {{7.0}, 0.8, 0.5}};
    std::vector<std::array<double, 2>> box;  // uniform only; empty = whole domain
};

struct CostConfig {
    double power = 2.0;
};

struct CongestionConfig {
    std::string kind = "power";
    double exponent = 8.0;
    double scale = 1.0;
};

struct InteractionConfig {
    double scale = 0.0;
    double exponent = 2.0;
};

struct PotentialConfig {
    double coeff = 0.0;
    std::vector<double> center{9.0};
    double exponent = 4.0;
    bool is_signed = false;
};

struct ToleranceConfig {
    double outer_tol = 1e-8;
    int max_outer = 5000;
    // Negative means "derive from outer_tol" (two orders tighter).
    double inner_tol_nu = -1.0;
    double inner_tol_marginal = 1e-8;
    int max_cycles = 20000;
    int trace_every = 1;
    double newton_tol = 1e-11;
    int newton_max_iter = 200;
};

struct SweepConfig {
    bool present = false;
    std::string parameter;
    std::vector<json> values;
};

struct TwoPopulationConfig {
    bool present = false;
    MeasureConfig mu{"gaussian_mixture", {{{12.0}, 0.8, 1.0}}, {}};
    CostConfig cost;
    CongestionConfig congestion;
    InteractionConfig interaction;
    PotentialConfig potential;
    double epsilon = -1.0;  // negative: inherit the top-level epsilon
    CongestionConfig shared_congestion{"power", 4.0};
};

struct OutputConfig {
    double support_threshold = 1e-6;  // relative to the largest coupling entry
};

struct RunConfig {
    DomainConfig domain;
    MeasureConfig mu;
    CostConfig cost;
    CongestionConfig congestion{"power", 8.0};
    InteractionConfig interaction;
    PotentialConfig potential{1.0, {9.0}, 4.0, false};
    double epsilon = 0.1;
    std::string scheme = "semi_implicit";
    ToleranceConfig tolerances;
    OutputConfig output;
    SweepConfig sweep;
    TwoPopulationConfig two_population;
};

namespace cfgdetail {

class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void fail(const std::string& path, const std::string& msg) {
        errors_.push_back(path + ": " + msg);
    }

    void check_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return;
        }
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* k : allowed)
                if (it.key() == k) {
                    known = true;
                    break;
                }
            if (!known) fail(path + "." + it.key(), "unknown key");
        }
    }

    bool has(const json& obj, const char* key) const {
        return obj.is_object() && obj.contains(key);
    }

    template <class T>
    void read(const json& obj, const std::string& path, const char* key, T& out) {
        if (!has(obj, key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            fail(path + "." + key, "wrong type");
        }
    }

private:
    std::vector<std::string>& errors_;
};

inline void read_bounds(Reader& r, const json& obj, const std::string& path, const char* key,
                        std::vector<std::array<double, 2>>& out) {
    if (!r.has(obj, key)) return;
    const json& b = obj.at(key);
    if (!b.is_array()) {
        r.fail(path + "." + key, "expected an array of [lo, hi] pairs");
        return;
    }
    std::vector<std::array<double, 2>> parsed;
    for (const auto& e : b) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            r.fail(path + "." + key, "each interval must be [lo, hi]");
            return;
        }
        parsed.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    out = std::move(parsed);
}

inline void read_measure(Reader& r, const json& obj, const std::string& path, MeasureConfig& m) {
    r.check_keys(obj, path, {"type", "components", "box"});
    r.read(obj, path, "type", m.type);
    if (m.type != "gaussian_mixture" && m.type != "uniform")
        r.fail(path + ".type", "must be gaussian_mixture or uniform");
    if (r.has(obj, "components")) {
        const json& comps = obj.at("components");
        if (!comps.is_array() || comps.empty()) {
            r.fail(path + ".components", "expected a non-empty array");
        } else {
            m.components.clear();
            int idx = 0;
            for (const auto& c : comps) {
                std::string cpath = path + ".components[" + std::to_string(idx++) + "]";
                r.check_keys(c, cpath, {"center", "stdev", "mass"});
                GaussianComponent g;
                g.center.clear();
                if (c.contains("center")) {
                    if (c.at("center").is_array()) {
                        for (const auto& x : c.at("center")) {
                            if (x.is_number())
                                g.center.push_back(x.get<double>());
                            else
                                r.fail(cpath + ".center", "coordinates must be numbers");
                        }
                    } else if (c.at("center").is_number()) {
                        g.center.push_back(c.at("center").get<double>());
                    } else {
                        r.fail(cpath + ".center", "expected a number or array");
                    }
                } else {
                    r.fail(cpath, "missing center");
                }
                r.read(c, cpath, "stdev", g.stdev);
                r.read(c, cpath, "mass", g.mass);
                if (!(g.stdev > 0.0)) r.fail(cpath + ".stdev", "must be positive");
                if (!(g.mass > 0.0)) r.fail(cpath + ".mass", "must be positive");
                m.components.push_back(std::move(g));
            }
        }
    }
    read_bounds(r, obj, path, "box", m.box);
    if (m.type == "gaussian_mixture" && m.components.empty())
        r.fail(path + ".components", "gaussian_mixture needs at least one component");
}

inline void read_cost(Reader& r, const json& obj, const std::string& path, CostConfig& c) {
    r.check_keys(obj, path, {"power"});
    r.read(obj, path, "power", c.power);
    if (!(c.power > 0.0)) r.fail(path + ".power", "must be positive");
}

inline void read_congestion(Reader& r, const json& obj, const std::string& path,
                            CongestionConfig& c) {
    r.check_keys(obj, path, {"kind", "exponent", "scale"});
    r.read(obj, path, "kind", c.kind);
    r.read(obj, path, "exponent", c.exponent);
    r.read(obj, path, "scale", c.scale);
    if (c.kind != "none" && c.kind != "power" && c.kind != "entropy" && c.kind != "log_barrier")
        r.fail(path + ".kind", "must be none, power, entropy or log_barrier");
    else if (c.kind == "power" && !(c.exponent > 1.0))
        r.fail(path + ".exponent", "power congestion needs exponent > 1");
    if (!(c.scale > 0.0)) r.fail(path + ".scale", "must be positive");
}

inline void read_interaction(Reader& r, const json& obj, const std::string& path,
                             InteractionConfig& c) {
    r.check_keys(obj, path, {"scale", "exponent"});
    r.read(obj, path, "scale", c.scale);
    r.read(obj, path, "exponent", c.exponent);
    if (!(c.scale >= 0.0)) r.fail(path + ".scale", "must be nonnegative");
    if (!(c.exponent > 0.0)) r.fail(path + ".exponent", "must be positive");
}

inline void read_potential(Reader& r, const json& obj, const std::string& path,
                           PotentialConfig& c) {
    r.check_keys(obj, path, {"coeff", "center", "exponent", "signed"});
    r.read(obj, path, "coeff", c.coeff);
    r.read(obj, path, "exponent", c.exponent);
    r.read(obj, path, "signed", c.is_signed);
    if (r.has(obj, "center")) {
        const json& ctr = obj.at("center");
        c.center.clear();
        if (ctr.is_array()) {
            for (const auto& x : ctr) {
                if (x.is_number())
                    c.center.push_back(x.get<double>());
                else
                    r.fail(path + ".center", "coordinates must be numbers");
            }
        } else if (ctr.is_number()) {
            c.center.push_back(ctr.get<double>());
        } else {
            r.fail(path + ".center", "expected a number or array");
        }
    }
    if (!(c.exponent > 0.0)) r.fail(path + ".exponent", "must be positive");
}

inline void read_tolerances(Reader& r, const json& obj, const std::string& path,
                            ToleranceConfig& t) {
    r.check_keys(obj, path,
                 {"outer_tol", "max_outer", "inner_tol_nu", "inner_tol_marginal", "max_cycles",
                  "trace_every", "newton_tol", "newton_max_iter"});
    r.read(obj, path, "outer_tol", t.outer_tol);
    r.read(obj, path, "max_outer", t.max_outer);
    r.read(obj, path, "inner_tol_nu", t.inner_tol_nu);
    r.read(obj, path, "inner_tol_marginal", t.inner_tol_marginal);
    r.read(obj, path, "max_cycles", t.max_cycles);
    r.read(obj, path, "trace_every", t.trace_every);
    r.read(obj, path, "newton_tol", t.newton_tol);
    r.read(obj, path, "newton_max_iter", t.newton_max_iter);
    if (!(t.outer_tol > 0.0)) r.fail(path + ".outer_tol", "must be positive");
    if (t.max_outer < 1) r.fail(path + ".max_outer", "must be >= 1");
    if (t.inner_tol_nu != -1.0 && !(t.inner_tol_nu > 0.0))
        r.fail(path + ".inner_tol_nu", "must be positive (or omitted)");
    if (!(t.inner_tol_marginal > 0.0)) r.fail(path + ".inner_tol_marginal", "must be positive");
    if (t.max_cycles < 1) r.fail(path + ".max_cycles", "must be >= 1");
    if (!(t.newton_tol > 0.0)) r.fail(path + ".newton_tol", "must be positive");
    if (t.newton_max_iter < 1) r.fail(path + ".newton_max_iter", "must be >= 1");
}

}  // namespace cfgdetail

// Known sweepable parameter paths (dotted into the config document).
inline const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> k = {
        "epsilon",
        "cost.power",
        "congestion.exponent",
        "interaction.scale",
        "interaction.exponent",
        "potential.coeff",
        "two_population.cost.power",
        "two_population.epsilon",
        "two_population.shared_congestion.exponent",
    };
    return k;
}

// Parses and validates a whole config document, collecting every violation
// before failing so a bad file reads as one report, not a guessing game.
inline RunConfig parse_config(const json& doc) {
    std::vector<std::string> errors;
    cfgdetail::Reader r(errors);
    RunConfig c;

    r.check_keys(doc, "$",
                 {"domain", "mu", "cost", "congestion", "interaction", "potential", "epsilon",
                  "scheme", "tolerances", "output", "sweep", "two_population"});
    if (!doc.is_object()) throw InvalidConfigError("config root must be a JSON object", errors);

    if (r.has(doc, "domain")) {
        const json& d = doc.at("domain");
        r.check_keys(d, "domain", {"dim", "bounds", "n"});
        r.read(d, "domain", "dim", c.domain.dim);
        r.read(d, "domain", "n", c.domain.n);
        cfgdetail::read_bounds(r, d, "domain", "bounds", c.domain.bounds);
        if (c.domain.dim != 1 && c.domain.dim != 2) r.fail("domain.dim", "must be 1 or 2");
        if (c.domain.n < 2) r.fail("domain.n", "must be >= 2");
        for (const auto& b : c.domain.bounds)
            if (!(b[0] < b[1])) r.fail("domain.bounds", "each interval needs lo < hi");
        if (c.domain.bounds.size() != 1 &&
            static_cast<int>(c.domain.bounds.size()) != c.domain.dim)
            r.fail("domain.bounds", "expected one interval, or one per axis");
    }
    if (r.has(doc, "mu")) cfgdetail::read_measure(r, doc.at("mu"), "mu", c.mu);
    if (r.has(doc, "cost")) cfgdetail::read_cost(r, doc.at("cost"), "cost", c.cost);
    if (r.has(doc, "congestion"))
        cfgdetail::read_congestion(r, doc.at("congestion"), "congestion", c.congestion);
    if (r.has(doc, "interaction"))
        cfgdetail::read_interaction(r, doc.at("interaction"), "interaction", c.interaction);
    if (r.has(doc, "potential"))
        cfgdetail::read_potential(r, doc.at("potential"), "potential", c.potential);
    r.read(doc, "$", "epsilon", c.epsilon);
    if (!(c.epsilon > 0.0)) r.fail("epsilon", "must be positive");
    r.read(doc, "$", "scheme", c.scheme);
    if (c.scheme != "implicit" && c.scheme != "semi_implicit")
        r.fail("scheme", "must be implicit or semi_implicit");
    if (r.has(doc, "tolerances"))
        cfgdetail::read_tolerances(r, doc.at("tolerances"), "tolerances", c.tolerances);
    if (r.has(doc, "output")) {
        const json& o = doc.at("output");
        r.check_keys(o, "output", {"support_threshold"});
        r.read(o, "output", "support_threshold", c.output.support_threshold);
        if (!(c.output.support_threshold > 0.0) || !(c.output.support_threshold < 1.0))
            r.fail("output.support_threshold", "must lie in (0, 1)");
    }
    if (r.has(doc, "sweep")) {
        const json& s = doc.at("sweep");
        r.check_keys(s, "sweep", {"parameter", "values"});
        c.sweep.present = true;
        r.read(s, "sweep", "parameter", c.sweep.parameter);
        if (r.has(s, "values")) {
            const json& v = s.at("values");
            if (!v.is_array() || v.empty())
                r.fail("sweep.values", "expected a non-empty array");
            else
                c.sweep.values.assign(v.begin(), v.end());
        } else {
            r.fail("sweep", "missing values");
        }
        bool known = false;
        for (const auto& k : sweepable_parameters())
            if (k == c.sweep.parameter) known = true;
        if (!known) r.fail("sweep.parameter", "not a sweepable parameter");
    }
    if (r.has(doc, "two_population")) {
        const json& t = doc.at("two_population");
        r.check_keys(t, "two_population",
                     {"mu", "cost", "congestion", "interaction", "potential", "epsilon",
                      "shared_congestion"});
        c.two_population.present = true;
        // Omitted subsections describe a second population that matches the
        // first, so a top-level sweep (say cost.power) moves both.
        c.two_population.cost = c.cost;
        c.two_population.congestion = c.congestion;
        c.two_population.interaction = c.interaction;
        c.two_population.potential = c.potential;
        if (r.has(t, "mu")) cfgdetail::read_measure(r, t.at("mu"), "two_population.mu",
                                                    c.two_population.mu);
        if (r.has(t, "cost"))
            cfgdetail::read_cost(r, t.at("cost"), "two_population.cost", c.two_population.cost);
        if (r.has(t, "congestion"))
            cfgdetail::read_congestion(r, t.at("congestion"), "two_population.congestion",
                                       c.two_population.congestion);
        if (r.has(t, "interaction"))
            cfgdetail::read_interaction(r, t.at("interaction"), "two_population.interaction",
                                        c.two_population.interaction);
        if (r.has(t, "potential"))
            cfgdetail::read_potential(r, t.at("potential"), "two_population.potential",
                                      c.two_population.potential);
        r.read(t, "two_population", "epsilon", c.two_population.epsilon);
        if (c.two_population.epsilon != -1.0 && !(c.two_population.epsilon > 0.0))
            r.fail("two_population.epsilon", "must be positive (or omitted to inherit)");
        if (r.has(t, "shared_congestion"))
            cfgdetail::read_congestion(r, t.at("shared_congestion"),
                                       "two_population.shared_congestion",
                                       c.two_population.shared_congestion);
        if (c.two_population.shared_congestion.kind == "log_barrier")
            r.fail("two_population.shared_congestion.kind", "log_barrier is not supported here");
        if (c.scheme == "implicit")
            r.fail("scheme", "two-population problems only run semi_implicit");
    }

    // Cross-field checks that need the final values.
    int dim = c.domain.dim;
    auto check_centers = [&](const MeasureConfig& m, const std::string& path) {
        if (m.type != "gaussian_mixture") return;
        int idx = 0;
        for (const auto& g : m.components) {
            if (static_cast<int>(g.center.size()) != dim)
                r.fail(path + ".components[" + std::to_string(idx) + "].center",
                       "needs " + std::to_string(dim) + " coordinate(s)");
            ++idx;
        }
    };
    check_centers(c.mu, "mu");
    if (c.potential.coeff != 0.0) {
        if (static_cast<int>(c.potential.center.size()) != dim)
            r.fail("potential.center", "needs " + std::to_string(dim) + " coordinate(s)");
        if (c.potential.is_signed && dim != 1) r.fail("potential.signed", "only valid in 1D");
    }
    if (c.congestion.kind == "log_barrier" && c.scheme == "implicit")
        r.fail("congestion.kind", "log_barrier requires the semi_implicit scheme");
    if (c.two_population.present) {
        check_centers(c.two_population.mu, "two_population.mu");
        if (c.two_population.potential.coeff != 0.0 &&
            static_cast<int>(c.two_population.potential.center.size()) != dim)
            r.fail("two_population.potential.center",
                   "needs " + std::to_string(dim) + " coordinate(s)");
        if (c.two_population.congestion.kind == "log_barrier")
            r.fail("two_population.congestion.kind", "log_barrier is not supported here");
    }

    if (!errors.empty()) {
        std::string msg = "config has " + std::to_string(errors.size()) + " violation(s):";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw InvalidConfigError(msg, errors);
    }
    return c;
}

inline RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

namespace cfgdetail {

inline json measure_to_json(const MeasureConfig& m) {
    json j;
    j["type"] = m.type;
    if (m.type == "gaussian_mixture") {
        json comps = json::array();
        for (const auto& g : m.components)
            comps.push_back({{"center", g.center}, {"stdev", g.stdev}, {"mass", g.mass}});
        j["components"] = comps;
    }
    if (!m.box.empty()) {
        json b = json::array();
        for (const auto& iv : m.box) b.push_back({iv[0], iv[1]});
        j["box"] = b;
    }
    return j;
}

inline json congestion_to_json(const CongestionConfig& c) {
    json j;
    j["kind"] = c.kind;
    if (c.kind == "power") j["exponent"] = c.exponent;
    if (c.scale != 1.0) j["scale"] = c.scale;
    return j;
}

inline json potential_to_json(const PotentialConfig& p) {
    json j;
    j["coeff"] = p.coeff;
    j["center"] = p.center;
    j["exponent"] = p.exponent;
    j["signed"] = p.is_signed;
    return j;
}

}  // namespace cfgdetail

// Canonical JSON form: every field explicit, so parse(serialize(c)) == c
// field-for-field and serialize(parse(serialize(c))) is a fixed point.
inline json serialize_config(const RunConfig& c) {
    json j;
    json bounds = json::array();
    for (const auto& iv : c.domain.bounds) bounds.push_back({iv[0], iv[1]});
    j["domain"] = {{"dim", c.domain.dim}, {"bounds", bounds}, {"n", c.domain.n}};
    j["mu"] = cfgdetail::measure_to_json(c.mu);
    j["cost"] = {{"power", c.cost.power}};
    j["congestion"] = cfgdetail::congestion_to_json(c.congestion);
    j["interaction"] = {{"scale", c.interaction.scale}, {"exponent", c.interaction.exponent}};
    j["potential"] = cfgdetail::potential_to_json(c.potential);
    j["epsilon"] = c.epsilon;
    j["scheme"] = c.scheme;
    j["tolerances"] = {{"outer_tol", c.tolerances.outer_tol},
                       {"max_outer", c.tolerances.max_outer},
                       {"inner_tol_nu", c.tolerances.inner_tol_nu},
                       {"inner_tol_marginal", c.tolerances.inner_tol_marginal},
                       {"max_cycles", c.tolerances.max_cycles},
                       {"trace_every", c.tolerances.trace_every},
                       {"newton_tol", c.tolerances.newton_tol},
                       {"newton_max_iter", c.tolerances.newton_max_iter}};
    j["output"] = {{"support_threshold", c.output.support_threshold}};
    if (c.sweep.present)
        j["sweep"] = {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
    if (c.two_population.present) {
        json t;
        t["mu"] = cfgdetail::measure_to_json(c.two_population.mu);
        t["cost"] = {{"power", c.two_population.cost.power}};
        t["congestion"] = cfgdetail::congestion_to_json(c.two_population.congestion);
        t["interaction"] = {{"scale", c.two_population.interaction.scale},
                            {"exponent", c.two_population.interaction.exponent}};
        t["potential"] = cfgdetail::potential_to_json(c.two_population.potential);
        if (c.two_population.epsilon > 0.0) t["epsilon"] = c.two_population.epsilon;
        t["shared_congestion"] = cfgdetail::congestion_to_json(c.two_population.shared_congestion);
        j["two_population"] = t;
    }
    return j;
}

inline CongestionKind congestion_kind_from(const std::string& name) {
    if (name == "none") return CongestionKind::none;
    if (name == "power") return CongestionKind::power;
    if (name == "entropy") return CongestionKind::entropy;
    if (name == "log_barrier") return CongestionKind::log_barrier;
    throw InvalidConfigError("unknown congestion kind: " + name);
}

namespace cfgdetail {

inline ProbabilityVector build_measure(const MeasureConfig& m, const DiscreteSpacePtr& space) {
    if (m.type == "uniform") {
        if (m.box.empty()) return uniform_measure(space);
        return uniform_measure(space, &m.box);
    }
    return gaussian_mixture(space, m.components);
}

inline ProblemSpec assemble(const DiscreteSpacePtr& space, const MeasureConfig& mu,
                            const CostConfig& cost, const CongestionConfig& congestion,
                            const InteractionConfig& interaction,
                            const PotentialConfig& potential, double epsilon) {
    ProblemSpec p;
    p.X = space;
    p.Y = space;
    p.mu = build_measure(mu, space);
    p.cost = power_cost(*space, *space, cost.power);
    p.congestion = make_congestion(congestion_kind_from(congestion.kind), congestion.exponent,
                                   congestion.scale);
    if (interaction.scale > 0.0)
        p.interaction = interaction_kernel(*space, interaction.scale, interaction.exponent);
    if (potential.coeff != 0.0)
        p.potential = power_potential(*space, potential.center, potential.exponent,
                                      potential.coeff, potential.is_signed);
    p.epsilon = epsilon;
    validate_problem(p);
    return p;
}

}  // namespace cfgdetail

// Types and strategies live on the same grid in every experiment this tool
// runs, so one space serves as both X and Y.
inline ProblemSpec build_problem(const RunConfig& c) {
    auto space = build_grid(c.domain.bounds, c.domain.n, c.domain.dim);
    return cfgdetail::assemble(space, c.mu, c.cost, c.congestion, c.interaction, c.potential,
                               c.epsilon);
}

inline TwoPopulationSpec build_two_population(const RunConfig& c) {
    if (!c.two_population.present)
        throw InvalidConfigError("config has no two_population section");
    auto space = build_grid(c.domain.bounds, c.domain.n, c.domain.dim);
    TwoPopulationSpec s;
    s.pop1 = cfgdetail::assemble(space, c.mu, c.cost, c.congestion, c.interaction, c.potential,
                                 c.epsilon);
    const auto& t = c.two_population;
    double eps2 = t.epsilon > 0.0 ? t.epsilon : c.epsilon;
    s.pop2 = cfgdetail::assemble(space, t.mu, t.cost, t.congestion, t.interaction, t.potential,
                                 eps2);
    s.shared_congestion =
        make_congestion(congestion_kind_from(t.shared_congestion.kind),
                        t.shared_congestion.exponent, t.shared_congestion.scale);
    validate_two_population(s);
    return s;
}

inline SchemeConfig build_scheme_config(const RunConfig& c) {
    SchemeConfig s;
    s.scheme = c.scheme == "implicit" ? Scheme::implicit : Scheme::semi_implicit;
    s.outer_tol = c.tolerances.outer_tol;
    s.max_outer = c.tolerances.max_outer;
    s.newton.tol = c.tolerances.newton_tol;
    s.newton.max_iter = c.tolerances.newton_max_iter;
    s.dykstra.tol_nu = c.tolerances.inner_tol_nu > 0.0 ? c.tolerances.inner_tol_nu
                                                       : c.tolerances.outer_tol * 1e-2;
    s.dykstra.tol_marginal = c.tolerances.inner_tol_marginal;
    s.dykstra.max_cycles = c.tolerances.max_cycles;
    s.dykstra.trace_every = c.tolerances.trace_every;
    return s;
}

// Applies "path.to.key=value" onto a JSON document. The value is parsed as
// JSON when possible, otherwise taken as a bare string.
inline void apply_override(json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw InvalidConfigError("override must look like key.path=value: " + assignment);
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;
    }
    json* node = &doc;
    size_t start = 0;
    while (true) {
        size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw InvalidConfigError("override has an empty path segment: " + path);
        if (dot == std::string::npos) {
            (*node)[key] = parsed;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

// Sets a sweep point: same navigation as apply_override, value preparsed.
inline void set_config_path(json& doc, const std::string& path, const json& value) {
    json* node = &doc;
    size_t start = 0;
    while (true) {
        size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace cournot
