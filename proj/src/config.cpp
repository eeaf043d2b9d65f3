#include "heatwave/config.hpp"

#include "heatwave/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace heatwave {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) {
            return d;
        }
    } catch (const std::exception&) {
    }
    throw ValidationError(key + ": expected a number, got '" + v + "'");
}

long to_long(const std::string& key, const std::string& v)
{
    long out = 0;
    const auto t = trim(v);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || p != t.data() + t.size()) {
        throw ValidationError(key + ": expected an integer, got '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

Point2 to_point(const std::string& key, const std::string& v)
{
    const auto parts = split_list(v);
    if (parts.size() != 2) {
        throw ValidationError(key + ": expected 'x,y', got '" + v + "'");
    }
    return {to_double(key, parts[0]), to_double(key, parts[1])};
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed)
{
    const auto t = trim(v);
    for (const char* a : allowed) {
        if (t == a) {
            return t;
        }
    }
    std::string msg = key + ": '" + v + "' is not one of";
    for (const char* a : allowed) {
        msg += std::string(" ") + a;
    }
    throw ValidationError(msg);
}

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

using F = ConfigField;

#define HW_NUM(field, sec, help)                                                                                    \
    F{#field, sec, help, [](RunConfig& c, const std::string& v) { c.field = to_double(#field, v); },                \
      [](const RunConfig& c) { return Json(c.field); }}
#define HW_INT(field, sec, help)                                                                                    \
    F{#field, sec, help,                                                                                            \
      [](RunConfig& c, const std::string& v) { c.field = static_cast<decltype(c.field)>(to_long(#field, v)); },     \
      [](const RunConfig& c) { return Json(c.field); }}
#define HW_STR(field, sec, help)                                                                                    \
    F{#field, sec, help, [](RunConfig& c, const std::string& v) { c.field = trim(v); },                             \
      [](const RunConfig& c) { return Json(c.field); }}

std::vector<ConfigField> make_fields()
{
    std::vector<ConfigField> f;
    f.push_back(HW_STR(experiment, "run", "experiment name"));
    f.push_back(F{"n", "mesh", "refinement ladder, comma separated (mesh: first entry)",
                  [](RunConfig& c, const std::string& v) {
                      c.n.clear();
                      for (const auto& s : split_list(v)) {
                          const long x = to_long("n", s);
                          if (x < 1) {
                              throw ValidationError("n: entries must be >= 1");
                          }
                          c.n.push_back(static_cast<int>(x));
                      }
                  },
                  [](const RunConfig& c) { return Json(c.n); }});
    f.push_back(HW_STR(out, "mesh", "mesh subcommand output file"));
    f.push_back(HW_NUM(T, "time", "final time"));
    f.push_back(F{"m", "time", "slab counts per ladder level; empty means M = n",
                  [](RunConfig& c, const std::string& v) {
                      c.m.clear();
                      for (const auto& s : split_list(v)) {
                          c.m.push_back(static_cast<int>(to_long("m", s)));
                      }
                  },
                  [](const RunConfig& c) { return Json(c.m); }});
    f.push_back(F{"partition", "time", "uniform or geometric",
                  [](RunConfig& c, const std::string& v) { c.partition = one_of("partition", v, {"uniform", "geometric"}); },
                  [](const RunConfig& c) { return Json(c.partition); }});
    f.push_back(HW_NUM(ratio, "time", "geometric step ratio"));
    f.push_back(HW_NUM(beta, "time", "exponent recorded in k_min / k^beta"));
    f.push_back(HW_INT(q, "time", "temporal degree (0, 1, 2)"));
    f.push_back(HW_INT(r, "space", "spatial degree (1, 2)"));
    f.push_back(F{"x0", "weight", "point x0 as 'x,y'",
                  [](RunConfig& c, const std::string& v) { c.x0 = to_point("x0", v); },
                  [](const RunConfig& c) { return c.x0 ? point_json(*c.x0) : Json(nullptr); }});
    f.push_back(HW_NUM(K, "weight", "weight constant K"));
    f.push_back(F{"k_list", "weight", "K values for the Green scan",
                  [](RunConfig& c, const std::string& v) {
                      c.k_list.clear();
                      for (const auto& s : split_list(v)) {
                          c.k_list.push_back(to_double("k_list", s));
                      }
                  },
                  [](const RunConfig& c) { return Json(c.k_list); }});
    f.push_back(F{"direction", "weight", "derivative direction x or y",
                  [](RunConfig& c, const std::string& v) { c.direction = one_of("direction", v, {"x", "y"}); },
                  [](const RunConfig& c) { return Json(c.direction); }});
    f.push_back(HW_NUM(t_tilde, "weight", "evaluation time as a fraction of T"));
    f.push_back(HW_NUM(gamma, "sector", "sector half-angle gamma"));
    f.push_back(F{"rays", "sector", "ray arguments, comma separated",
                  [](RunConfig& c, const std::string& v) {
                      c.rays.clear();
                      for (const auto& s : split_list(v)) {
                          c.rays.push_back(to_double("rays", s));
                      }
                  },
                  [](const RunConfig& c) { return Json(c.rays); }});
    f.push_back(F{"radii", "sector", "moduli, comma separated",
                  [](RunConfig& c, const std::string& v) {
                      c.radii.clear();
                      for (const auto& s : split_list(v)) {
                          c.radii.push_back(to_double("radii", s));
                      }
                  },
                  [](const RunConfig& c) { return Json(c.radii); }});
    f.push_back(F{"norms", "sector", "norm kinds: L2, weighted_L2, weighted_Hm1",
                  [](RunConfig& c, const std::string& v) {
                      c.norms.clear();
                      for (const auto& s : split_list(v)) {
                          c.norms.push_back(one_of("norms", s, {"L2", "weighted_L2", "weighted_Hm1"}));
                      }
                  },
                  [](const RunConfig& c) { return Json(c.norms); }});
    f.push_back(HW_NUM(tol, "solver", "eigen iteration tolerance"));
    f.push_back(HW_INT(max_iter, "solver", "eigen iteration cap"));
    f.push_back(F{"eig_method", "solver", "lanczos or power",
                  [](RunConfig& c, const std::string& v) { c.eig_method = one_of("eig_method", v, {"lanczos", "power"}); },
                  [](const RunConfig& c) { return Json(c.eig_method); }});
    f.push_back(F{"block_solve", "solver", "diagonalized or block",
                  [](RunConfig& c, const std::string& v) {
                      c.block_solve = one_of("block_solve", v, {"diagonalized", "block"});
                  },
                  [](const RunConfig& c) { return Json(c.block_solve); }});
    f.push_back(F{"solution", "study", "manufactured solution: smooth, discrete or kink",
                  [](RunConfig& c, const std::string& v) {
                      c.solution = one_of("solution", v, {"smooth", "discrete", "kink"});
                  },
                  [](const RunConfig& c) { return Json(c.solution); }});
    f.push_back(F{"mode", "study", "conv mode: ladder or k_only",
                  [](RunConfig& c, const std::string& v) { c.mode = one_of("mode", v, {"ladder", "k_only"}); },
                  [](const RunConfig& c) { return Json(c.mode); }});
    f.push_back(F{"forcing", "study", "maxreg forcing: smooth or delta",
                  [](RunConfig& c, const std::string& v) { c.forcing = one_of("forcing", v, {"smooth", "delta"}); },
                  [](const RunConfig& c) { return Json(c.forcing); }});
    f.push_back(HW_NUM(d, "study", "interior ball radius"));
    f.push_back(F{"kink_center", "study", "kink point as 'x,y'",
                  [](RunConfig& c, const std::string& v) { c.kink_center = to_point("kink_center", v); },
                  [](const RunConfig& c) { return point_json(c.kink_center); }});
    f.push_back(HW_NUM(kink_amplitude, "study", "kink amplitude"));
    f.push_back(HW_INT(fine_levels, "study", "extra refinements of the Green reference mesh"));
    f.push_back(HW_INT(samples, "study", "random fields per mesh in the lemma suite"));
    f.push_back(F{"seed", "study", "random seed",
                  [](RunConfig& c, const std::string& v) {
                      const long s = to_long("seed", v);
                      if (s < 0) {
                          throw ValidationError("seed: must be nonnegative");
                      }
                      c.seed = static_cast<std::uint64_t>(s);
                  },
                  [](const RunConfig& c) { return Json(c.seed); }});
    f.push_back(HW_INT(count, "study", "complex inequality sample count"));
    f.push_back(HW_NUM(window_tight, "windows", "stability window (25% default)"));
    f.push_back(HW_NUM(window_mid, "windows", "stability window (35% default)"));
    f.push_back(HW_NUM(window_loose, "windows", "stability window (50% default)"));
    f.push_back(HW_NUM(window_const, "windows", "constant-within window (10% default)"));
    f.push_back(HW_STR(output_dir, "output", "report directory"));
    return f;
}

#undef HW_NUM
#undef HW_INT
#undef HW_STR

} // namespace

const std::vector<ConfigField>& config_fields()
{
    static const auto fields = make_fields();
    return fields;
}

std::string kebab(const std::string& key)
{
    std::string s = key;
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

namespace {

const ConfigField* find_field(const std::string& key)
{
    for (const auto& f : config_fields()) {
        if (f.key == key || kebab(f.key) == key) {
            return &f;
        }
    }
    return nullptr;
}

} // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value)
{
    const auto* f = find_field(key);
    if (f == nullptr) {
        throw ValidationError("unknown config key '" + key + "'");
    }
    f->set(cfg, value);
}

void apply_config_text(RunConfig& cfg, const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError(lineno, "unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            const auto& fs = config_fields();
            if (std::none_of(fs.begin(), fs.end(), [&](const ConfigField& f) { return f.section == section; })) {
                throw ParseError(lineno, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(lineno, "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto* f = find_field(key);
        if (f == nullptr) {
            throw ParseError(lineno, "unknown key '" + key + "'");
        }
        if (!section.empty() && f->section != section) {
            throw ParseError(lineno, "key '" + key + "' belongs to section [" + f->section + "], not [" + section + "]");
        }
        try {
            f->set(cfg, value);
        } catch (const ValidationError& e) {
            throw ParseError(lineno, e.what());
        }
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) {
        throw Error("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        apply_config_text(cfg, ss.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + std::string(e.what()).substr(std::string(e.what()).find(':') + 2));
    }
}

Json echo(const RunConfig& cfg)
{
    Json j = Json::object();
    for (const auto& f : config_fields()) {
        j[f.key] = f.get(cfg);
    }
    return j;
}

} // namespace heatwave
