#include "gdens/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <vector>

#include "gdens/csv.hpp"
#include "gdens/stats.hpp"

namespace gdens {

namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_number_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(field, &used));
            if (trim(field.substr(used)) != "") throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw ConfigError(what + ": not a number: '" + field + "'");
        }
    }
    if (out.empty()) throw ConfigError(what + ": empty value");
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    const std::vector<double> v = parse_number_list(s, what);
    if (v.size() != 1) throw ConfigError(what + ": expected a single number");
    return v[0];
}

std::string resolve_path(const std::string& base_dir, const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute() || base_dir.empty()) return rel;
    return (std::filesystem::path(base_dir) / p).string();
}

void require_file(const std::string& path, const std::string& what) {
    if (!std::filesystem::exists(path))
        throw ConfigError(what + ": file does not exist: " + path);
}

// "label:payload" -> {label, payload} (payload may be empty).
std::pair<std::string, std::string> split_label(const std::string& s) {
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos) return {s, ""};
    return {trim(s.substr(0, colon)), trim(s.substr(colon + 1))};
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const std::string& base_dir) {
    ExperimentConfig cfg;
    cfg.source_path = origin;
    cfg.base_dir = base_dir;
    cfg.fingerprint = text_fingerprint(text);

    std::istringstream lines(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(lines, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail("unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "model" && section != "functional" && section != "mc" &&
                section != "grid" && section != "tails" && section != "output")
                fail("unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty()) fail("key outside any section");
        if (value.empty()) fail("empty value for " + key);
        const std::string where = origin + ":" + std::to_string(lineno);
        if (section == "model") {
            if (key == "type")
                cfg.model_type = value;
            else if (key == "k_csv")
                cfg.k_csv = value;
            else if (key == "k_inline")
                cfg.k_inline = value;
            else if (key == "grid")
                cfg.grid_spec = value;
            else if (key == "hurst")
                cfg.hurst = parse_number(value, where);
            else
                fail("unknown key model." + key);
        } else if (section == "functional") {
            if (key == "variant")
                cfg.variant = value;
            else if (key == "f")
                cfg.f_spec = value;
            else
                fail("unknown key functional." + key);
        } else if (section == "mc") {
            if (key == "samples")
                cfg.samples = static_cast<std::size_t>(parse_number(value, where));
            else if (key == "seed") {
                cfg.seed = std::stoull(value);
                cfg.seed_set = true;
            } else if (key == "strata")
                cfg.strata = static_cast<std::uint32_t>(parse_number(value, where));
            else if (key == "centering_samples")
                cfg.centering_samples = static_cast<std::size_t>(parse_number(value, where));
            else
                fail("unknown key mc." + key);
        } else if (section == "grid") {
            if (key == "points")
                cfg.grid_points = static_cast<std::size_t>(parse_number(value, where));
            else if (key == "range")
                cfg.grid_range = value;
            else if (key == "bandwidth")
                cfg.bandwidth = parse_number(value, where);
            else
                fail("unknown key grid." + key);
        } else if (section == "tails") {
            if (key == "beta_exp")
                cfg.beta_exp = parse_number(value, where);
            else if (key == "alpha_thr")
                cfg.alpha_thr = value;
            else if (key == "g_quantile")
                cfg.g_quantile = parse_number(value, where);
            else
                fail("unknown key tails." + key);
        } else if (section == "output") {
            if (key == "dir")
                cfg.out_dir = value;
            else if (key == "format")
                cfg.format = value;
            else
                fail("unknown key output." + key);
        }
    }

    // Cross-field validation.
    if (cfg.model_type != "explicit" && cfg.model_type != "fbm" && cfg.model_type != "tabulated")
        throw ConfigError(origin + ": model.type must be explicit, fbm or tabulated");
    if (cfg.variant != "vector_max" && cfg.variant != "process_sup" &&
        cfg.variant != "monotone_integral" && cfg.variant != "fbm_quadratic")
        throw ConfigError(origin + ": unknown functional.variant '" + cfg.variant + "'");
    if (!cfg.seed_set) throw ConfigError(origin + ": mc.seed is mandatory");
    if (cfg.samples < 1000) throw ConfigError(origin + ": mc.samples must be at least 1000");
    if (cfg.strata < 1 || cfg.strata > 64)
        throw ConfigError(origin + ": mc.strata must be between 1 and 64");
    if (cfg.grid_points < 11) throw ConfigError(origin + ": grid.points must be at least 11");
    if (cfg.bandwidth < 0.0) throw ConfigError(origin + ": grid.bandwidth must be >= 0");
    if (!(cfg.beta_exp > 1.0)) throw ConfigError(origin + ": tails.beta_exp must exceed 1");
    if (!(cfg.g_quantile >= 0.0 && cfg.g_quantile < 0.5))
        throw ConfigError(origin + ": tails.g_quantile must be in [0, 0.5)");
    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "both")
        throw ConfigError(origin + ": output.format must be csv, json or both");
    if (cfg.model_type == "explicit") {
        if (cfg.k_csv.empty() == cfg.k_inline.empty())
            throw ConfigError(origin + ": explicit model needs exactly one of k_csv / k_inline");
    } else {
        if (cfg.grid_spec.empty())
            throw ConfigError(origin + ": model.grid is required for " + cfg.model_type);
        if (cfg.model_type == "tabulated" && cfg.k_csv.empty())
            throw ConfigError(origin + ": tabulated model needs model.k_csv");
        if (cfg.model_type == "fbm" && !(cfg.hurst > 0.0 && cfg.hurst < 1.0))
            throw ConfigError(origin + ": model.hurst must be in (0,1)");
    }
    if (cfg.variant == "monotone_integral" && cfg.f_spec.empty())
        throw ConfigError(origin + ": monotone_integral needs functional.f");
    if (cfg.variant != "vector_max" && cfg.model_type == "explicit")
        throw ConfigError(origin + ": " + cfg.variant + " needs a gridded (fbm/tabulated) model");
    if (cfg.variant == "fbm_quadratic") {
        if (cfg.model_type != "fbm")
            throw ConfigError(origin + ": fbm_quadratic needs an fbm model");
        if (split_label(cfg.grid_spec).first != "midpoint")
            throw ConfigError(origin + ": fbm_quadratic needs a midpoint grid");
    }
    const auto range = split_label(cfg.grid_range);
    if (range.first == "quantile" || range.first == "fixed") {
        const std::vector<double> ab =
            parse_number_list(range.second, origin + ": grid.range");
        if (ab.size() != 2 || !(ab[1] > ab[0]))
            throw ConfigError(origin + ": grid.range needs two increasing numbers");
        if (range.first == "quantile" && !(ab[0] > 0.0 && ab[1] < 1.0))
            throw ConfigError(origin + ": quantile range must be inside (0,1)");
    } else {
        throw ConfigError(origin + ": grid.range must be quantile:lo,hi or fixed:lo,hi");
    }
    if (cfg.alpha_thr != "auto") parse_number(cfg.alpha_thr, origin + ": tails.alpha_thr");

    // Referenced files must exist up front.
    if (!cfg.k_csv.empty()) require_file(resolve_path(base_dir, cfg.k_csv), origin + ": model.k_csv");
    const auto grid = split_label(cfg.grid_spec);
    if (grid.first == "csv") require_file(resolve_path(base_dir, grid.second), origin + ": model.grid");
    const auto fsp = split_label(cfg.f_spec);
    if (fsp.first == "csv") require_file(resolve_path(base_dir, fsp.second), origin + ": functional.f");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    const std::string text = read_text_file(path);
    const std::string base = std::filesystem::path(path).parent_path().string();
    return parse_config_text(text, path, base);
}

GaussianModel model_from_config(const ExperimentConfig& cfg) {
    if (cfg.model_type == "explicit") {
        CsvMatrix m;
        if (!cfg.k_csv.empty()) {
            m = read_csv_matrix(resolve_path(cfg.base_dir, cfg.k_csv));
        } else {
            // inline rows separated by ';'
            std::string text = cfg.k_inline;
            std::replace(text.begin(), text.end(), ';', '\n');
            m = parse_csv_matrix(text, cfg.source_path + ": model.k_inline");
        }
        if (m.rows != m.cols)
            throw ConfigError(cfg.source_path + ": covariance matrix must be square");
        return build_model(CovarianceMatrix::build(m.rows, std::move(m.data)));
    }

    const auto grid_spec = split_label(cfg.grid_spec);
    ProcessGrid grid;
    if (grid_spec.first == "uniform") {
        const std::vector<double> abm =
            parse_number_list(grid_spec.second, cfg.source_path + ": model.grid");
        if (abm.size() != 3 || !(abm[1] > abm[0]) || abm[2] < 2)
            throw ConfigError(cfg.source_path + ": model.grid uniform needs a,b,m");
        grid = ProcessGrid::trapezoid(linspace(abm[0], abm[1], static_cast<std::size_t>(abm[2])));
    } else if (grid_spec.first == "midpoint") {
        const std::vector<double> tm =
            parse_number_list(grid_spec.second, cfg.source_path + ": model.grid");
        if (tm.size() != 2 || !(tm[0] > 0.0) || tm[1] < 2)
            throw ConfigError(cfg.source_path + ": model.grid midpoint needs T,m");
        grid = ProcessGrid::midpoint_cells(tm[0], static_cast<std::size_t>(tm[1]));
    } else if (grid_spec.first == "csv") {
        const CsvMatrix m = read_csv_matrix(resolve_path(cfg.base_dir, grid_spec.second));
        if (m.cols != 1)
            throw ConfigError(cfg.source_path + ": grid csv must have a single column");
        grid = ProcessGrid::trapezoid(m.data);
    } else {
        throw ConfigError(cfg.source_path + ": model.grid must be uniform:, midpoint: or csv:");
    }

    if (cfg.model_type == "fbm") return build_fbm_model(std::move(grid), cfg.hurst);
    const CsvMatrix k = read_csv_matrix(resolve_path(cfg.base_dir, cfg.k_csv));
    if (k.rows != k.cols || k.rows != grid.size())
        throw ConfigError(cfg.source_path + ": tabulated kernel must be square and match the grid");
    return build_tabulated_model(std::move(grid), k.data);
}

Functional functional_from_config(const ExperimentConfig& cfg) {
    if (cfg.variant == "vector_max") return Functional::vector_max();
    if (cfg.variant == "process_sup") return Functional::process_sup();
    if (cfg.variant == "fbm_quadratic") return Functional::fbm_quadratic();
    const auto fsp = split_label(cfg.f_spec);
    if (fsp.first == "linear")
        return Functional::monotone_integral(
            MonotoneFn::linear(parse_number(fsp.second, cfg.source_path + ": functional.f")));
    if (fsp.first == "sigmoid") {
        const std::vector<double> ab =
            parse_number_list(fsp.second, cfg.source_path + ": functional.f");
        if (ab.size() != 2)
            throw ConfigError(cfg.source_path + ": functional.f sigmoid needs lo,hi");
        return Functional::monotone_integral(MonotoneFn::sigmoid_blend(ab[0], ab[1]));
    }
    if (fsp.first == "csv") {
        const CsvMatrix m = read_csv_matrix(resolve_path(cfg.base_dir, fsp.second));
        if (m.cols != 2)
            throw ConfigError(cfg.source_path + ": functional.f csv needs two columns x,f(x)");
        std::vector<double> xs(m.rows), ys(m.rows);
        for (std::size_t i = 0; i < m.rows; ++i) {
            xs[i] = m.at(i, 0);
            ys[i] = m.at(i, 1);
        }
        return Functional::monotone_integral(MonotoneFn::tabulated(std::move(xs), std::move(ys)));
    }
    throw ConfigError(cfg.source_path + ": functional.f must be linear:, sigmoid: or csv:");
}

} // namespace gdens
