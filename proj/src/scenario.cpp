#include "tsg/scenario.hpp"

#include <json.hpp>

#include <set>

namespace tsg {

using nlohmann::json;

std::string_view theorem_name(TheoremId id) {
    switch (id) {
        case TheoremId::lemma: return "lemma";
        case TheoremId::thm21: return "thm21";
        case TheoremId::thm31: return "thm31";
        case TheoremId::thm32: return "thm32";
        case TheoremId::thm33: return "thm33";
    }
    return "?";
}

std::optional<TheoremId> theorem_from_name(std::string_view name) {
    if (name == "lemma") return TheoremId::lemma;
    if (name == "thm21") return TheoremId::thm21;
    if (name == "thm31") return TheoremId::thm31;
    if (name == "thm32") return TheoremId::thm32;
    if (name == "thm33") return TheoremId::thm33;
    return std::nullopt;
}

bool theorem_is_3d(TheoremId id) {
    return id != TheoremId::lemma;
}

std::string ScenarioValidationError::join_messages(const std::vector<Diagnostic>& diags) {
    std::string out = std::to_string(diags.size()) + " validation problem(s)";
    for (const Diagnostic& d : diags) {
        out += "\n  - ";
        out += errc_name(d.code);
        out += ": ";
        out += d.message;
    }
    return out;
}

ScenarioValidationError::ScenarioValidationError(std::vector<Diagnostic> diags)
    : Error(Errc::parse_error, join_messages(diags)), diags_(std::move(diags)) {}

namespace {

/// Required function names per theorem; the lemma's live on T1 x T2, all
/// others on the full three-scale domain.
std::vector<std::string> required_functions(TheoremId id) {
    switch (id) {
        case TheoremId::lemma: return {"a", "f"};
        case TheoremId::thm21: return {"p1", "p2", "f"};
        case TheoremId::thm31:
        case TheoremId::thm32: return {"g", "r", "f"};
        case TheoremId::thm33: return {"g", "v", "r", "f"};
    }
    return {};
}

class Validator {
public:
    explicit Validator(const std::string& text) : text_(text) {}

    Scenario run() {
        json doc;
        try {
            doc = json::parse(text_);
        } catch (const json::exception& e) {
            fail(Errc::parse_error, e.what());
            throw ScenarioValidationError(std::move(diags_));
        }
        if (!doc.is_object()) {
            fail(Errc::parse_error, "scenario document must be a JSON object");
            throw ScenarioValidationError(std::move(diags_));
        }

        parse_scales(doc);
        parse_theorem(doc);
        parse_functions(doc);
        parse_options(doc);
        // Kernels describe three-variable equations; the lemma has none.
        if (theorem_known_ && theorem_is_3d(scenario_.theorem)) {
            scenario_.kernel = parse_kernel(doc, "kernel");
            if (doc.contains("kernel_g")) {
                scenario_.kernel_g = parse_kernel(doc, "kernel_g");
            }
        }
        cross_validate();

        if (!diags_.empty()) {
            throw ScenarioValidationError(std::move(diags_));
        }
        return std::move(scenario_);
    }

private:
    void fail(Errc code, std::string message) { diags_.push_back({code, std::move(message)}); }

    static bool is_number(const json& v) { return v.is_number(); }

    std::optional<double> get_number(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) {
            fail(Errc::parse_error, where + " is missing key '" + key + "'");
            return std::nullopt;
        }
        if (!is_number(obj[key])) {
            fail(Errc::parse_error, where + " key '" + key + "' must be a number");
            return std::nullopt;
        }
        return obj[key].get<double>();
    }

    std::optional<ScaleSpec> parse_scale_spec(const json& node, const std::string& where) {
        if (!node.is_object() || !node.contains("kind") || !node["kind"].is_string()) {
            fail(Errc::bad_scale_spec, where + " must be an object with a 'kind' string");
            return std::nullopt;
        }
        const std::string kind = node["kind"].get<std::string>();
        std::optional<ScaleSpec> spec;
        if (kind == "explicit") {
            if (!node.contains("points") || !node["points"].is_array()) {
                fail(Errc::bad_scale_spec, where + " explicit scale needs a 'points' array");
                return std::nullopt;
            }
            std::vector<double> pts;
            for (const auto& p : node["points"]) {
                if (!is_number(p)) {
                    fail(Errc::bad_scale_spec, where + " points must all be numbers");
                    return std::nullopt;
                }
                pts.push_back(p.get<double>());
            }
            spec = ExplicitSpec{std::move(pts)};
        } else if (kind == "uniform") {
            auto start = get_number(node, "start", where);
            auto stop = get_number(node, "stop", where);
            auto n = get_number(node, "n", where);
            if (!start || !stop || !n) return std::nullopt;
            spec = UniformSpec{*start, *stop, static_cast<std::size_t>(*n)};
        } else if (kind == "integers") {
            auto lo = get_number(node, "lo", where);
            auto hi = get_number(node, "hi", where);
            if (!lo || !hi) return std::nullopt;
            spec = IntegersSpec{static_cast<long>(*lo), static_cast<long>(*hi)};
        } else if (kind == "q_scale") {
            auto q = get_number(node, "q", where);
            auto t0 = get_number(node, "t0", where);
            auto n = get_number(node, "n", where);
            if (!q || !t0 || !n) return std::nullopt;
            spec = QScaleSpec{*q, *t0, static_cast<std::size_t>(*n)};
        } else {
            fail(Errc::bad_scale_spec, where + " has unknown kind '" + kind + "'");
            return std::nullopt;
        }
        // Probe the spec so parameter problems surface at load time.
        try {
            const TimeScale ts = make_scale(*spec);
            scale_sizes_[where] = ts.size();
        } catch (const Error& e) {
            fail(Errc::bad_scale_spec, where + ": " + e.what());
            return std::nullopt;
        }
        return spec;
    }

    void parse_scales(const json& doc) {
        if (!doc.contains("scales") || !doc["scales"].is_object()) {
            fail(Errc::parse_error, "scenario needs a 'scales' object");
            return;
        }
        const json& scales = doc["scales"];
        if (scales.contains("t1")) {
            if (auto s = parse_scale_spec(scales["t1"], "scales.t1")) scenario_.t1 = *s;
        } else {
            fail(Errc::bad_scale_spec, "scales.t1 is required");
        }
        if (scales.contains("t2")) {
            if (auto s = parse_scale_spec(scales["t2"], "scales.t2")) scenario_.t2 = *s;
        } else {
            fail(Errc::bad_scale_spec, "scales.t2 is required");
        }
        if (scales.contains("i")) {
            if (auto s = parse_scale_spec(scales["i"], "scales.i")) scenario_.iscale = *s;
        }
    }

    void parse_theorem(const json& doc) {
        if (!doc.contains("theorem") || !doc["theorem"].is_string()) {
            fail(Errc::parse_error, "scenario needs a 'theorem' string");
            return;
        }
        const std::string name = doc["theorem"].get<std::string>();
        if (auto id = theorem_from_name(name)) {
            scenario_.theorem = *id;
            theorem_known_ = true;
        } else {
            fail(Errc::parse_error,
                 "unknown theorem '" + name + "' (expected lemma|thm21|thm31|thm32|thm33)");
        }
    }

    /// Flatten a rectangular nested array, recording its shape.
    bool flatten_table(const json& node, std::size_t depth_left, std::vector<std::size_t>& shape,
                       std::vector<double>& flat, const std::string& where) {
        if (depth_left == 0) {
            if (!is_number(node)) {
                fail(Errc::parse_error, where + " table entries must be numbers");
                return false;
            }
            flat.push_back(node.get<double>());
            return true;
        }
        if (!node.is_array() || node.empty()) {
            fail(Errc::parse_error, where + " table must be made of non-empty arrays");
            return false;
        }
        const std::size_t dim = shape.size() - depth_left;
        if (shape[dim] == 0) {
            shape[dim] = node.size();
        } else if (shape[dim] != node.size()) {
            fail(Errc::shape_mismatch, where + " table is ragged");
            return false;
        }
        for (const auto& child : node) {
            if (!flatten_table(child, depth_left - 1, shape, flat, where)) return false;
        }
        return true;
    }

    static std::size_t nesting_depth(const json& node) {
        std::size_t depth = 0;
        const json* cur = &node;
        while (cur->is_array() && !cur->empty()) {
            ++depth;
            cur = &(*cur)[0];
        }
        return depth;
    }

    void parse_functions(const json& doc) {
        if (!doc.contains("functions")) {
            return;  // missing-function diagnostics are produced in cross_validate
        }
        if (!doc["functions"].is_object()) {
            fail(Errc::parse_error, "'functions' must be an object");
            return;
        }
        for (const auto& [name, def] : doc["functions"].items()) {
            const std::string where = "functions." + name;
            if (!def.is_object()) {
                fail(Errc::parse_error, where + " must be an object");
                continue;
            }
            FunctionDef fd;
            if (def.contains("expr")) {
                if (!def["expr"].is_string()) {
                    fail(Errc::parse_error, where + ".expr must be a string");
                    continue;
                }
                try {
                    fd.expr = Expression::parse(def["expr"].get<std::string>());
                } catch (const Error& e) {
                    fail(e.code(), where + ": " + e.what());
                    continue;
                }
            } else if (def.contains("table")) {
                const std::size_t depth = nesting_depth(def["table"]);
                if (depth != 2 && depth != 3) {
                    fail(Errc::shape_mismatch,
                         where + " table must be nested 2 or 3 levels deep");
                    continue;
                }
                fd.shape.assign(depth, 0);
                if (!flatten_table(def["table"], depth, fd.shape, fd.table, where)) {
                    continue;
                }
            } else {
                fail(Errc::parse_error, where + " needs either 'expr' or 'table'");
                continue;
            }
            scenario_.functions.emplace(name, std::move(fd));
        }
    }

    std::optional<KernelDef> parse_kernel(const json& doc, const char* key) {
        KernelDef def;
        if (!doc.contains(key)) {
            // Defaults to the equality-case separable kernel of the theorem.
            if (scenario_.theorem == TheoremId::thm21) {
                def.r_name = "p2";
                def.f_name = "f";
            } else {
                def.r_name = "r";
                def.f_name = "f";
            }
            return def;
        }
        const json& node = doc[key];
        const std::string where = key;
        if (!node.is_object() || !node.contains("family") || !node["family"].is_string()) {
            fail(Errc::parse_error, where + " must be an object with a 'family' string");
            return std::nullopt;
        }
        const std::string family = node["family"].get<std::string>();
        auto ref = [&](const char* fname, std::string& out) {
            if (!node.contains(fname) || !node[fname].is_string()) {
                fail(Errc::parse_error,
                     where + " family " + family + " needs a '" + fname + "' function name");
                return false;
            }
            out = node[fname].get<std::string>();
            return true;
        };
        if (family == "separable_linear") {
            def.family = KernelFamily::separable_linear;
            if (!ref("r", def.r_name) || !ref("f", def.f_name)) return std::nullopt;
        } else if (family == "separable_affine") {
            def.family = KernelFamily::separable_affine;
            if (!ref("r", def.r_name) || !ref("f", def.f_name) || !ref("w", def.w_name)) {
                return std::nullopt;
            }
        } else if (family == "tabulated_linear") {
            def.family = KernelFamily::tabulated_linear;
            if (!node.contains("table") || !node["table"].is_array()) {
                fail(Errc::parse_error, where + " tabulated kernel needs a flat 'table' array");
                return std::nullopt;
            }
            for (const auto& v : node["table"]) {
                if (!is_number(v)) {
                    fail(Errc::parse_error, where + " table entries must be numbers");
                    return std::nullopt;
                }
                def.table.push_back(v.get<double>());
            }
        } else {
            fail(Errc::parse_error, where + " has unknown kernel family '" + family + "'");
            return std::nullopt;
        }
        return def;
    }

    void parse_options(const json& doc) {
        if (!doc.contains("options")) return;
        const json& opts = doc["options"];
        if (!opts.is_object()) {
            fail(Errc::parse_error, "'options' must be an object");
            return;
        }
        if (opts.contains("tolerance")) {
            if (!is_number(opts["tolerance"])) {
                fail(Errc::parse_error, "options.tolerance must be a number");
            } else {
                scenario_.tolerance = opts["tolerance"].get<double>();
                if (!(scenario_.tolerance > 0.0)) {
                    fail(Errc::bad_parameter, "options.tolerance must be > 0");
                }
            }
        }
        if (opts.contains("fuzz")) {
            const json& fz = opts["fuzz"];
            if (!fz.is_object()) {
                fail(Errc::parse_error, "options.fuzz must be an object");
                return;
            }
            auto num = [&](const char* key, double fallback) {
                if (!fz.contains(key)) return fallback;
                if (!is_number(fz[key])) {
                    fail(Errc::parse_error, std::string("options.fuzz.") + key +
                                                " must be a number");
                    return fallback;
                }
                return fz[key].get<double>();
            };
            scenario_.fuzz.count = static_cast<std::size_t>(num("count", 100));
            scenario_.fuzz.seed = static_cast<std::uint64_t>(num("seed", 0));
            scenario_.fuzz.max_points_xy = static_cast<std::size_t>(num("max_points_xy", 12));
            scenario_.fuzz.max_points_i = static_cast<std::size_t>(num("max_points_i", 6));
            scenario_.fuzz.coeff_max = num("coeff_max", 2.0);
            if (scenario_.fuzz.count < 1) fail(Errc::bad_parameter, "options.fuzz.count must be >= 1");
            if (scenario_.fuzz.max_points_xy < 2 || scenario_.fuzz.max_points_i < 2) {
                fail(Errc::bad_parameter, "options.fuzz point caps must be >= 2");
            }
            if (!(scenario_.fuzz.coeff_max > 0.0)) {
                fail(Errc::bad_parameter, "options.fuzz.coeff_max must be > 0");
            }
        }
    }

    /// Checks that need several parts at once: required functions, expression
    /// variables, table shapes against scale sizes, kernel references.
    void cross_validate() {
        if (!theorem_known_) return;
        const bool is3d = theorem_is_3d(scenario_.theorem);

        if (is3d && !scenario_.iscale.has_value()) {
            fail(Errc::bad_scale_spec,
                 std::string("theorem ") + std::string(theorem_name(scenario_.theorem)) +
                     " needs the third scale 'scales.i'");
        }

        std::set<std::string> needed;
        for (const std::string& name : required_functions(scenario_.theorem)) {
            needed.insert(name);
        }
        for (const std::optional<KernelDef>& kd : {scenario_.kernel, scenario_.kernel_g}) {
            if (!kd || kd->family == KernelFamily::tabulated_linear) continue;
            needed.insert(kd->r_name);
            needed.insert(kd->f_name);
            if (kd->family == KernelFamily::separable_affine) needed.insert(kd->w_name);
        }

        const std::uint8_t allowed_mask =
            is3d ? (EvalContext::mask_of(Var::x) | EvalContext::mask_of(Var::y) |
                    EvalContext::mask_of(Var::z))
                 : (EvalContext::mask_of(Var::x) | EvalContext::mask_of(Var::y));

        for (const std::string& name : needed) {
            auto it = scenario_.functions.find(name);
            if (it == scenario_.functions.end()) {
                fail(Errc::missing_function, "scenario does not define function '" + name + "'");
                continue;
            }
            const FunctionDef& fd = it->second;
            if (fd.is_expression()) {
                const std::uint8_t stray =
                    fd.expr->free_var_mask() & static_cast<std::uint8_t>(~allowed_mask);
                if (stray != 0) {
                    for (unsigned v = 0; v < 6; ++v) {
                        if (stray & (1u << v)) {
                            fail(Errc::expression_error,
                                 "function '" + name + "' references variable '" +
                                     std::string(var_name(static_cast<Var>(v))) +
                                     "', which is not bound on this grid");
                            break;
                        }
                    }
                }
            } else {
                const std::size_t want_dims = is3d ? 3 : 2;
                if (fd.shape.size() != want_dims) {
                    fail(Errc::shape_mismatch, "function '" + name + "' table has " +
                                                   std::to_string(fd.shape.size()) +
                                                   " dimensions, theorem needs " +
                                                   std::to_string(want_dims));
                    continue;
                }
                check_extent(name, fd.shape[0], "scales.t1");
                check_extent(name, fd.shape[1], "scales.t2");
                if (is3d) check_extent(name, fd.shape[2], "scales.i");
            }
        }

        if (scenario_.kernel && scenario_.kernel->family == KernelFamily::tabulated_linear) {
            check_kernel_table(*scenario_.kernel, "kernel");
        }
        if (scenario_.kernel_g && scenario_.kernel_g->family == KernelFamily::tabulated_linear) {
            check_kernel_table(*scenario_.kernel_g, "kernel_g");
        }
    }

    void check_extent(const std::string& fname, std::size_t got, const std::string& scale_key) {
        auto it = scale_sizes_.find(scale_key);
        if (it == scale_sizes_.end()) return;  // scale itself already failed
        if (got != it->second) {
            fail(Errc::shape_mismatch, "function '" + fname + "' extent " + std::to_string(got) +
                                           " does not match " + scale_key + " size " +
                                           std::to_string(it->second));
        }
    }

    void check_kernel_table(const KernelDef& def, const std::string& where) {
        std::size_t nodes = 1;
        for (const char* key : {"scales.t1", "scales.t2", "scales.i"}) {
            auto it = scale_sizes_.find(key);
            if (it == scale_sizes_.end()) return;
            nodes *= it->second;
        }
        if (def.table.size() != nodes * nodes) {
            fail(Errc::kernel_shape_mismatch,
                 where + " table needs " + std::to_string(nodes * nodes) + " entries, got " +
                     std::to_string(def.table.size()));
        }
    }

    const std::string& text_;
    Scenario scenario_;
    std::vector<Diagnostic> diags_;
    std::map<std::string, std::size_t> scale_sizes_;
    bool theorem_known_ = false;
};

} // namespace

Scenario load_scenario(const std::string& text) {
    return Validator(text).run();
}

} // namespace tsg
