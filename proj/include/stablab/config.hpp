#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/functionals.hpp"
#include "stablab/harness.hpp"
#include "stablab/measures.hpp"
#include "stablab/point_process.hpp"
#include "stablab/stabilization.hpp"

// Line-oriented config format: "key = value" pairs, optional [section]
// headers that prefix the following keys as "section.key", comments from '#'
// to end of line. Lists are bracketed and comma separated: [1, 2, 3].
// Parsing is total: every diagnostic carries a line and column, and unknown
// keys are errors.

namespace stablab {

namespace config_detail {

struct KvEntry {
    std::string value;
    int line = 0;
    int col = 0;
    mutable bool consumed = false;
};

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Section headers are grouping sugar for the flat key set: a key inside
// [section] canonicalizes to its flat name. Three sections rename their keys
// to avoid clashes (density.source, test_function.*, rho.*).
inline std::string canonical_key(const std::string& section, const std::string& key, int line) {
    if (section.empty()) return key;
    if (section == "density") return key == "source" ? "density" : key;
    if (section == "test_function") return key == "kind" ? "f" : "f_" + key;
    if (section == "rho") return key == "kind" ? "rho" : "rho_" + key;
    if (section == "functional" || section == "experiment" || section == "tails" ||
        section == "stab" || section == "bounds")
        return key;
    throw ConfigError(line, 1, "unknown section '" + section + "'");
}

class KvDoc {
public:
    static KvDoc parse(const std::string& text) {
        KvDoc doc;
        std::istringstream is(text);
        std::string raw;
        int lineno = 0;
        std::string section;
        while (std::getline(is, raw)) {
            ++lineno;
            std::string line = raw;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line = line.substr(0, hash);
            const std::string body = trim(line);
            if (body.empty()) continue;
            if (body.front() == '[') {
                if (body.back() != ']')
                    throw ConfigError(lineno, 1, "unterminated section header");
                section = trim(body.substr(1, body.size() - 2));
                if (section.empty()) throw ConfigError(lineno, 1, "empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(lineno, 1, "expected key = value");
            const std::string key_part = trim(line.substr(0, eq));
            if (key_part.empty()) throw ConfigError(lineno, 1, "empty key");
            const std::string key = canonical_key(section, key_part, lineno);
            std::size_t vcol = eq + 1;
            while (vcol < line.size() && std::isspace(static_cast<unsigned char>(line[vcol])))
                ++vcol;
            KvEntry entry;
            entry.value = trim(line.substr(eq + 1));
            entry.line = lineno;
            entry.col = static_cast<int>(vcol) + 1;
            if (!doc.entries_.emplace(key, entry).second) {
                throw ConfigError(lineno, 1, "duplicate key '" + key + "'");
            }
        }
        return doc;
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const KvEntry& at(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw ConfigError(0, 0, "missing required key '" + key + "'");
        it->second.consumed = true;
        return it->second;
    }

    std::string get_string(const std::string& key) const { return at(key).value; }

    std::string get_string_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    double get_double(const std::string& key) const {
        const auto& e = at(key);
        return parse_double(e.value, e.line, e.col);
    }

    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long long get_int(const std::string& key) const {
        const auto& e = at(key);
        return parse_int(e.value, e.line, e.col);
    }

    long long get_int_or(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    std::uint64_t get_uint64(const std::string& key) const {
        const auto& e = at(key);
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(e.line, e.col, "malformed unsigned integer '" + e.value + "'");
        }
    }

    bool get_bool(const std::string& key) const {
        const auto& e = at(key);
        if (e.value == "true") return true;
        if (e.value == "false") return false;
        throw ConfigError(e.line, e.col, "expected true or false, got '" + e.value + "'");
    }

    bool get_bool_or(const std::string& key, bool fallback) const {
        return has(key) ? get_bool(key) : fallback;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        const auto& e = at(key);
        std::string v = e.value;
        if (v.size() < 2 || v.front() != '[' || v.back() != ']')
            throw ConfigError(e.line, e.col, "expected a bracketed list");
        v = v.substr(1, v.size() - 2);
        std::vector<double> out;
        std::string item;
        std::istringstream is(v);
        while (std::getline(is, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) throw ConfigError(e.line, e.col, "empty list element");
            out.push_back(parse_double(t, e.line, e.col));
        }
        if (out.empty()) throw ConfigError(e.line, e.col, "empty list");
        return out;
    }

    /// Fails on any key that was never consumed, naming the first offender.
    void finish() const {
        for (const auto& [key, entry] : entries_) {
            if (!entry.consumed)
                throw ConfigError(entry.line, 1, "unknown key '" + key + "'");
        }
    }

    const KvEntry& entry(const std::string& key) const { return at(key); }

private:
    static double parse_double(const std::string& s, int line, int col) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(line, col, "malformed number '" + s + "'");
        }
    }

    static long long parse_int(const std::string& s, int line, int col) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(line, col, "malformed integer '" + s + "'");
        }
    }

    std::map<std::string, KvEntry> entries_;
};

inline std::string render_double(double v) { return detail::format_double(v); }

inline std::string render_list(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += render_double(xs[i]);
    }
    return out + "]";
}

}  // namespace config_detail

// ---------------------------------------------------------------------------
// Typed specs (the parsed form of each config; value-comparable for
// round-trip checks)

struct DescriptorSpec {
    std::string kind = "knn";
    std::optional<long long> k;
    std::optional<double> s;
    std::optional<long long> delta;
    std::optional<double> b;
    std::optional<double> r;
    std::optional<std::string> q_kind;  // "const" | "coord"
    std::optional<double> q_value;
    std::optional<long long> q_axis;    // 1-based axis
    long long cap = kDefaultIndependenceCap;

    bool operator==(const DescriptorSpec&) const = default;

    FunctionalDescriptor build() const {
        FunctionalDescriptor d;
        if (kind == "knn") {
            if (!k) throw Error("descriptor: kind knn requires k");
            d = FunctionalDescriptor::knn(static_cast<int>(*k));
        } else if (kind == "knn-indicator") {
            if (!s) throw Error("descriptor: kind knn-indicator requires s");
            d = FunctionalDescriptor::knn_indicator(*s);
        } else if (kind == "two-color") {
            if (!q_kind) throw Error("descriptor: kind two-color requires q");
            if (*q_kind == "const") {
                if (!q_value) throw Error("descriptor: q = const requires q_value");
                d = FunctionalDescriptor::two_color(QField::constant(*q_value));
            } else if (*q_kind == "coord") {
                if (!q_axis) throw Error("descriptor: q = coord requires q_axis");
                d = FunctionalDescriptor::two_color(
                    QField::coordinate(static_cast<int>(*q_axis) - 1));
            } else {
                throw Error("descriptor: unknown q kind '" + *q_kind + "'");
            }
        } else if (kind == "voronoi") {
            d = FunctionalDescriptor::voronoi();
        } else if (kind == "sig-half-degree") {
            d = FunctionalDescriptor::sig_half_degree();
        } else if (kind == "sig-degree-indicator") {
            if (!delta) throw Error("descriptor: kind sig-degree-indicator requires delta");
            d = FunctionalDescriptor::sig_degree_indicator(static_cast<int>(*delta));
        } else if (kind == "rsa") {
            if (!r) throw Error("descriptor: kind rsa requires r");
            d = FunctionalDescriptor::rsa(*r);
        } else if (kind == "independence-ratio") {
            if (!b) throw Error("descriptor: kind independence-ratio requires b");
            d = FunctionalDescriptor::independence_ratio(*b, static_cast<int>(cap));
        } else {
            throw Error("descriptor: unknown kind '" + kind + "'");
        }
        d.validate();
        return d;
    }
};

struct DensitySpec {
    long long dim = 2;
    std::string source = "uniform";    // "uniform" | "grid:<csv path>"
    std::vector<double> box_lo, box_hi;  // empty = unit cube

    bool operator==(const DensitySpec&) const = default;

    Density build() const {
        if (source == "uniform") {
            if (box_lo.empty())
                return Density::uniform(Domain::unit_cube(static_cast<int>(dim)));
            return Density::uniform(Domain(static_cast<int>(dim), box_lo, box_hi));
        }
        if (source.rfind("grid:", 0) == 0) {
            const std::string path = source.substr(5);
            std::ifstream in(path);
            if (!in) throw Error("density: cannot open grid file '" + path + "'");
            Density d = read_density_csv(in);
            if (d.dim() != static_cast<int>(dim))
                throw Error("density: grid file dimension " + std::to_string(d.dim()) +
                            " does not match dim = " + std::to_string(dim));
            return d;
        }
        throw Error("density: unknown source '" + source + "'");
    }
};

struct TestFunctionSpec {
    std::string kind = "const";  // "const" | "box" | "linear"
    double value = 1.0;
    std::vector<double> lo, hi, coeffs;

    bool operator==(const TestFunctionSpec&) const = default;

    TestFunction build() const {
        if (kind == "const") return TestFunction::constant(value);
        if (kind == "box") return TestFunction::box(lo, hi);
        if (kind == "linear") return TestFunction::linear(coeffs);
        throw Error("test function: unknown kind '" + kind + "'");
    }
};

struct RhoSpecText {
    std::string kind = "exp";  // "exp" | "poly"
    double alpha = 1.0;
    double p = 4.0;
    double gamma = 0.0;

    bool operator==(const RhoSpecText&) const = default;

    RhoSpec build() const {
        RhoSpec rs;
        if (kind == "exp") {
            rs.kind = RhoSpec::Kind::Exponential;
            rs.alpha = alpha;
        } else if (kind == "poly") {
            rs.kind = RhoSpec::Kind::Polynomial;
            rs.p = p;
            rs.gamma = gamma;
        } else {
            throw Error("rho: unknown kind '" + kind + "'");
        }
        return rs;
    }
};

struct ExperimentSpec {
    DescriptorSpec descriptor;
    DensitySpec density;
    TestFunctionSpec f;
    std::vector<double> lambdas;
    long long m = 2;
    std::uint64_t seed = 1;
    long long threads = 0;
    std::optional<RhoSpecText> rho;

    bool operator==(const ExperimentSpec&) const = default;

    ExperimentConfig build() const {
        ExperimentConfig cfg;
        cfg.descriptor = descriptor.build();
        cfg.density = density.build();
        cfg.f = f.build();
        cfg.lambdas = lambdas;
        cfg.m = static_cast<int>(m);
        cfg.master_seed = seed;
        cfg.threads = static_cast<int>(threads);
        if (rho) cfg.rho = rho->build();
        cfg.validate();
        return cfg;
    }
};

struct TailsSpec {
    DescriptorSpec descriptor;
    DensitySpec density;
    std::string rule = "nn";  // "nn" | "component" | "probe"
    double rule_b = 0.0;
    double probe_radius = 0.0;
    std::vector<double> lambdas;
    std::string probe = "grid:1";          // "grid:<n>" | "points"
    std::vector<double> probe_points;      // flat, when probe = points
    long long replicates = 100;
    std::vector<double> t;
    std::uint64_t seed = 1;

    bool operator==(const TailsSpec&) const = default;

    RadiusRule build_rule() const {
        if (rule == "nn") return RadiusRule::nn_distance();
        if (rule == "component") return RadiusRule::component_extent(rule_b);
        if (rule == "probe") return RadiusRule::user_probe(probe_radius);
        throw Error("tails: unknown rule '" + rule + "'");
    }

    ProbeSpec build_probe() const {
        if (probe.rfind("grid:", 0) == 0) {
            return ProbeSpec::interior_grid(std::stoi(probe.substr(5)));
        }
        if (probe == "points") {
            const auto d = static_cast<std::size_t>(density.dim);
            if (probe_points.empty() || probe_points.size() % d != 0)
                throw Error("tails: probe_points length must be a positive multiple of dim");
            std::vector<std::vector<double>> pts;
            for (std::size_t i = 0; i < probe_points.size(); i += d)
                pts.emplace_back(probe_points.begin() + i, probe_points.begin() + i + d);
            return ProbeSpec::at(std::move(pts));
        }
        throw Error("tails: unknown probe spec '" + probe + "'");
    }
};

struct VerifyStabSpec {
    DescriptorSpec descriptor;
    DensitySpec density;
    std::string rule = "nn";
    double rule_b = 0.0;
    double probe_radius = 0.0;
    double lambda = 2.0;
    long long trials = 1000;
    std::uint64_t seed = 1;
    std::vector<double> probe_point;  // empty = domain center
    bool negative_control = false;

    bool operator==(const VerifyStabSpec&) const = default;

    RadiusRule build_rule() const {
        if (rule == "nn") return RadiusRule::nn_distance();
        if (rule == "component") return RadiusRule::component_extent(rule_b);
        if (rule == "probe") return RadiusRule::user_probe(probe_radius);
        throw Error("verify-stab: unknown rule '" + rule + "'");
    }
};

struct BoundsSpec {
    std::optional<ChenShaoInput> chen_shao;
    std::optional<double> lambda;
    std::optional<double> alpha;                      // rho exponential
    std::optional<double> p, gamma;                   // rho polynomial / rate exponent
    std::optional<long long> dim;
    std::optional<double> variance;                   // rate bound
    double C = 1.0;

    bool operator==(const BoundsSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Parsers

namespace config_detail {

inline DescriptorSpec parse_descriptor(const KvDoc& doc) {
    DescriptorSpec d;
    d.kind = doc.get_string("kind");
    if (doc.has("k")) d.k = doc.get_int("k");
    if (doc.has("s")) d.s = doc.get_double("s");
    if (doc.has("delta")) d.delta = doc.get_int("delta");
    if (doc.has("b")) d.b = doc.get_double("b");
    if (doc.has("r")) d.r = doc.get_double("r");
    if (doc.has("q")) d.q_kind = doc.get_string("q");
    if (doc.has("q_value")) d.q_value = doc.get_double("q_value");
    if (doc.has("q_axis")) d.q_axis = doc.get_int("q_axis");
    if (doc.has("cap")) d.cap = doc.get_int("cap");
    // range checks with locations
    if (d.k && *d.k < 1) {
        const auto& e = doc.entry("k");
        throw ConfigError(e.line, e.col, "k must be >= 1");
    }
    if (d.s && !(*d.s > 0.0)) {
        const auto& e = doc.entry("s");
        throw ConfigError(e.line, e.col, "s must be positive");
    }
    if (d.delta && *d.delta < 0) {
        const auto& e = doc.entry("delta");
        throw ConfigError(e.line, e.col, "delta must be nonnegative");
    }
    if (d.b && !(*d.b > 0.0)) {
        const auto& e = doc.entry("b");
        throw ConfigError(e.line, e.col, "b must be positive");
    }
    if (d.r && !(*d.r > 0.0)) {
        const auto& e = doc.entry("r");
        throw ConfigError(e.line, e.col, "r must be positive");
    }
    if (d.q_value && (*d.q_value < 0.0 || *d.q_value > 1.0)) {
        const auto& e = doc.entry("q_value");
        throw ConfigError(e.line, e.col, "q_value must lie in [0,1]");
    }
    if (d.q_axis && *d.q_axis < 1) {
        const auto& e = doc.entry("q_axis");
        throw ConfigError(e.line, e.col, "q_axis is 1-based");
    }
    if (d.cap < 1 || d.cap > 64) {
        const auto& e = doc.entry("cap");
        throw ConfigError(e.line, e.col, "cap must lie in [1, 64]");
    }
    return d;
}

inline DensitySpec parse_density(const KvDoc& doc) {
    DensitySpec ds;
    ds.dim = doc.get_int_or("dim", 2);
    if (ds.dim < 1) {
        const auto& e = doc.entry("dim");
        throw ConfigError(e.line, e.col, "dim must be positive");
    }
    ds.source = doc.get_string_or("density", "uniform");
    if (doc.has("box_lo") != doc.has("box_hi"))
        throw ConfigError(0, 0, "box_lo and box_hi must be given together");
    if (doc.has("box_lo")) {
        ds.box_lo = doc.get_double_list("box_lo");
        ds.box_hi = doc.get_double_list("box_hi");
        if (ds.box_lo.size() != static_cast<std::size_t>(ds.dim) ||
            ds.box_hi.size() != static_cast<std::size_t>(ds.dim)) {
            const auto& e = doc.entry("box_lo");
            throw ConfigError(e.line, e.col, "box bounds must have dim entries");
        }
        for (std::size_t a = 0; a < ds.box_lo.size(); ++a)
            if (!(ds.box_hi[a] > ds.box_lo[a])) {
                const auto& e = doc.entry("box_hi");
                throw ConfigError(e.line, e.col, "box must have positive extent per axis");
            }
    }
    return ds;
}

inline TestFunctionSpec parse_test_function(const KvDoc& doc) {
    TestFunctionSpec f;
    f.kind = doc.get_string_or("f", "const");
    if (f.kind == "const") {
        f.value = doc.get_double_or("f_value", 1.0);
    } else if (f.kind == "box") {
        f.lo = doc.get_double_list("f_lo");
        f.hi = doc.get_double_list("f_hi");
    } else if (f.kind == "linear") {
        f.coeffs = doc.get_double_list("f_coeffs");
    } else {
        const auto& e = doc.entry("f");
        throw ConfigError(e.line, e.col, "f must be const, box, or linear");
    }
    return f;
}

inline std::optional<RhoSpecText> parse_rho(const KvDoc& doc) {
    if (!doc.has("rho")) return std::nullopt;
    RhoSpecText r;
    r.kind = doc.get_string("rho");
    if (r.kind == "exp") {
        r.alpha = doc.get_double_or("rho_alpha", 1.0);
        if (!(r.alpha > 0.0)) {
            const auto& e = doc.entry("rho_alpha");
            throw ConfigError(e.line, e.col, "rho_alpha must be positive");
        }
    } else if (r.kind == "poly") {
        r.p = doc.get_double("rho_p");
        r.gamma = doc.get_double("rho_gamma");
    } else {
        const auto& e = doc.entry("rho");
        throw ConfigError(e.line, e.col, "rho must be exp or poly");
    }
    return r;
}

}  // namespace config_detail

inline ExperimentSpec parse_experiment_config(const std::string& text) {
    using namespace config_detail;
    const KvDoc doc = KvDoc::parse(text);
    ExperimentSpec spec;
    spec.descriptor = parse_descriptor(doc);
    spec.density = parse_density(doc);
    spec.f = parse_test_function(doc);
    spec.lambdas = doc.get_double_list("lambda");
    for (double l : spec.lambdas)
        if (!(l >= 2.0)) {
            const auto& e = doc.entry("lambda");
            throw ConfigError(e.line, e.col, "every lambda must be >= 2");
        }
    for (std::size_t i = 1; i < spec.lambdas.size(); ++i)
        if (!(spec.lambdas[i] > spec.lambdas[i - 1])) {
            const auto& e = doc.entry("lambda");
            throw ConfigError(e.line, e.col, "lambda grid must be strictly increasing");
        }
    spec.m = doc.get_int("m");
    if (spec.m < 2) {
        const auto& e = doc.entry("m");
        throw ConfigError(e.line, e.col, "m must be >= 2");
    }
    spec.seed = doc.get_uint64("seed");
    spec.threads = doc.get_int_or("threads", 0);
    spec.rho = parse_rho(doc);
    doc.finish();
    return spec;
}

inline TailsSpec parse_tails_config(const std::string& text) {
    using namespace config_detail;
    const KvDoc doc = KvDoc::parse(text);
    TailsSpec spec;
    spec.descriptor = parse_descriptor(doc);
    spec.density = parse_density(doc);
    spec.rule = doc.get_string_or("rule", "nn");
    if (spec.rule == "component") spec.rule_b = doc.get_double("rule_b");
    if (spec.rule == "probe") spec.probe_radius = doc.get_double("probe_radius");
    spec.lambdas = doc.get_double_list("lambda");
    spec.probe = doc.get_string_or("probe", "grid:1");
    if (spec.probe == "points") spec.probe_points = doc.get_double_list("probe_points");
    spec.replicates = doc.get_int("replicates");
    if (spec.replicates < 1) {
        const auto& e = doc.entry("replicates");
        throw ConfigError(e.line, e.col, "replicates must be >= 1");
    }
    spec.t = doc.get_double_list("t");
    spec.seed = doc.get_uint64("seed");
    doc.finish();
    return spec;
}

inline VerifyStabSpec parse_verify_stab_config(const std::string& text) {
    using namespace config_detail;
    const KvDoc doc = KvDoc::parse(text);
    VerifyStabSpec spec;
    spec.descriptor = parse_descriptor(doc);
    spec.density = parse_density(doc);
    spec.rule = doc.get_string_or("rule", "nn");
    if (spec.rule == "component") spec.rule_b = doc.get_double("rule_b");
    if (spec.rule == "probe") spec.probe_radius = doc.get_double("probe_radius");
    spec.lambda = doc.get_double("lambda");
    spec.trials = doc.get_int("trials");
    if (spec.trials < 1) {
        const auto& e = doc.entry("trials");
        throw ConfigError(e.line, e.col, "trials must be >= 1");
    }
    spec.seed = doc.get_uint64("seed");
    if (doc.has("probe_point")) spec.probe_point = doc.get_double_list("probe_point");
    spec.negative_control = doc.get_bool_or("negative_control", false);
    doc.finish();
    return spec;
}

inline BoundsSpec parse_bounds_config(const std::string& text) {
    using namespace config_detail;
    const KvDoc doc = KvDoc::parse(text);
    BoundsSpec spec;
    const bool has_cs = doc.has("q") || doc.has("D") || doc.has("V") || doc.has("theta");
    if (has_cs) {
        ChenShaoInput in;
        in.q = doc.get_double("q");
        in.D = doc.get_int("D");
        in.V = doc.get_int("V");
        in.theta = doc.get_double("theta");
        try {
            in.validate();
        } catch (const Error& err) {
            const auto& e = doc.entry("q");
            throw ConfigError(e.line, e.col, err.what());
        }
        spec.chen_shao = in;
    }
    if (doc.has("lambda")) spec.lambda = doc.get_double("lambda");
    if (doc.has("alpha")) spec.alpha = doc.get_double("alpha");
    if (doc.has("p")) spec.p = doc.get_double("p");
    if (doc.has("gamma")) spec.gamma = doc.get_double("gamma");
    if (doc.has("dim")) spec.dim = doc.get_int("dim");
    if (doc.has("variance")) spec.variance = doc.get_double("variance");
    spec.C = doc.get_double_or("C", 1.0);
    if (!spec.chen_shao && !spec.lambda && !spec.p)
        throw ConfigError(0, 0, "bounds config requests nothing to evaluate");
    doc.finish();
    return spec;
}

// ---------------------------------------------------------------------------
// Renderers (canonical form; parse(render(spec)) == spec)

namespace config_detail {

inline void render_descriptor(std::ostream& os, const DescriptorSpec& d) {
    os << "kind = " << d.kind << "\n";
    if (d.k) os << "k = " << *d.k << "\n";
    if (d.s) os << "s = " << render_double(*d.s) << "\n";
    if (d.delta) os << "delta = " << *d.delta << "\n";
    if (d.b) os << "b = " << render_double(*d.b) << "\n";
    if (d.r) os << "r = " << render_double(*d.r) << "\n";
    if (d.q_kind) os << "q = " << *d.q_kind << "\n";
    if (d.q_value) os << "q_value = " << render_double(*d.q_value) << "\n";
    if (d.q_axis) os << "q_axis = " << *d.q_axis << "\n";
    if (d.cap != kDefaultIndependenceCap) os << "cap = " << d.cap << "\n";
}

inline void render_density(std::ostream& os, const DensitySpec& ds) {
    os << "dim = " << ds.dim << "\n";
    if (ds.source != "uniform") os << "density = " << ds.source << "\n";
    if (!ds.box_lo.empty()) {
        os << "box_lo = " << render_list(ds.box_lo) << "\n";
        os << "box_hi = " << render_list(ds.box_hi) << "\n";
    }
}

inline void render_test_function(std::ostream& os, const TestFunctionSpec& f) {
    os << "f = " << f.kind << "\n";
    if (f.kind == "const") {
        os << "f_value = " << render_double(f.value) << "\n";
    } else if (f.kind == "box") {
        os << "f_lo = " << render_list(f.lo) << "\n";
        os << "f_hi = " << render_list(f.hi) << "\n";
    } else if (f.kind == "linear") {
        os << "f_coeffs = " << render_list(f.coeffs) << "\n";
    }
}

}  // namespace config_detail

inline std::string render_experiment_config(const ExperimentSpec& spec) {
    using namespace config_detail;
    std::ostringstream os;
    render_descriptor(os, spec.descriptor);
    render_density(os, spec.density);
    render_test_function(os, spec.f);
    os << "lambda = " << render_list(spec.lambdas) << "\n";
    os << "m = " << spec.m << "\n";
    os << "seed = " << spec.seed << "\n";
    if (spec.threads != 0) os << "threads = " << spec.threads << "\n";
    if (spec.rho) {
        os << "rho = " << spec.rho->kind << "\n";
        if (spec.rho->kind == "exp") os << "rho_alpha = " << render_double(spec.rho->alpha) << "\n";
        if (spec.rho->kind == "poly") {
            os << "rho_p = " << render_double(spec.rho->p) << "\n";
            os << "rho_gamma = " << render_double(spec.rho->gamma) << "\n";
        }
    }
    return os.str();
}

inline std::string render_tails_config(const TailsSpec& spec) {
    using namespace config_detail;
    std::ostringstream os;
    render_descriptor(os, spec.descriptor);
    render_density(os, spec.density);
    os << "rule = " << spec.rule << "\n";
    if (spec.rule == "component") os << "rule_b = " << render_double(spec.rule_b) << "\n";
    if (spec.rule == "probe") os << "probe_radius = " << render_double(spec.probe_radius) << "\n";
    os << "lambda = " << render_list(spec.lambdas) << "\n";
    os << "probe = " << spec.probe << "\n";
    if (spec.probe == "points") os << "probe_points = " << render_list(spec.probe_points) << "\n";
    os << "replicates = " << spec.replicates << "\n";
    os << "t = " << render_list(spec.t) << "\n";
    os << "seed = " << spec.seed << "\n";
    return os.str();
}

inline std::string render_verify_stab_config(const VerifyStabSpec& spec) {
    using namespace config_detail;
    std::ostringstream os;
    render_descriptor(os, spec.descriptor);
    render_density(os, spec.density);
    os << "rule = " << spec.rule << "\n";
    if (spec.rule == "component") os << "rule_b = " << render_double(spec.rule_b) << "\n";
    if (spec.rule == "probe") os << "probe_radius = " << render_double(spec.probe_radius) << "\n";
    os << "lambda = " << render_double(spec.lambda) << "\n";
    os << "trials = " << spec.trials << "\n";
    os << "seed = " << spec.seed << "\n";
    if (!spec.probe_point.empty())
        os << "probe_point = " << render_list(spec.probe_point) << "\n";
    if (spec.negative_control) os << "negative_control = true\n";
    return os.str();
}

inline std::string render_bounds_config(const BoundsSpec& spec) {
    using namespace config_detail;
    std::ostringstream os;
    if (spec.chen_shao) {
        os << "q = " << render_double(spec.chen_shao->q) << "\n";
        os << "D = " << spec.chen_shao->D << "\n";
        os << "V = " << spec.chen_shao->V << "\n";
        os << "theta = " << render_double(spec.chen_shao->theta) << "\n";
    }
    if (spec.lambda) os << "lambda = " << render_double(*spec.lambda) << "\n";
    if (spec.alpha) os << "alpha = " << render_double(*spec.alpha) << "\n";
    if (spec.p) os << "p = " << render_double(*spec.p) << "\n";
    if (spec.gamma) os << "gamma = " << render_double(*spec.gamma) << "\n";
    if (spec.dim) os << "dim = " << *spec.dim << "\n";
    if (spec.variance) os << "variance = " << render_double(*spec.variance) << "\n";
    if (spec.C != 1.0) os << "C = " << render_double(spec.C) << "\n";
    return os.str();
}

}  // namespace stablab
