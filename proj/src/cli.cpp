#include "skewcert/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

#include "skewcert/generators.hpp"
#include "skewcert/model_io.hpp"
#include "skewcert/render.hpp"
#include "skewcert/text_format.hpp"
#include "skewcert/verifier.hpp"

namespace skewcert {

namespace {

double parse_real(std::string_view s, std::string_view what) {
    const std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw std::invalid_argument("bad number '" + tmp + "' in " + std::string(what));
    }
    return v;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next - pos)));
        if (next == std::string_view::npos) return out;
        pos = next + 1;
    }
}

}  // namespace

Complex parse_complex(std::string_view text) {
    std::string s;
    for (char ch : text) {
        if (ch != ' ' && ch != '\t') s += ch;
    }
    if (s.empty()) throw std::invalid_argument("empty complex number");
    if (s.back() != 'i') return {parse_real(s, "complex number"), 0.0};
    s.pop_back();
    // The imaginary part starts at the last sign that is not an exponent sign.
    std::size_t split_at = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split_at = k;
            break;
        }
    }
    const std::string re = split_at == std::string::npos ? "" : s.substr(0, split_at);
    const std::string im = split_at == std::string::npos ? s : s.substr(split_at);
    double imag = 0;
    if (im.empty() || im == "+") {
        imag = 1;
    } else if (im == "-") {
        imag = -1;
    } else {
        imag = parse_real(im, "complex number");
    }
    return {re.empty() ? 0.0 : parse_real(re, "complex number"), imag};
}

SkewMap parse_map_spec(std::string_view text) {
    SkewMap m;
    bool seen[4] = {};
    for (const std::string& item : split(text, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("map entry '" + item + "' lacks '='");
        const std::string key = trim(std::string_view(item).substr(0, eq));
        const Complex v = parse_complex(std::string_view(item).substr(eq + 1));
        const int slot = key == "a" ? 0 : key == "b" ? 1 : key == "c" ? 2 : key == "e" ? 3 : -1;
        if (slot < 0) throw std::invalid_argument("unknown map coefficient '" + key + "'");
        if (seen[slot]) throw std::invalid_argument("map coefficient '" + key + "' given twice");
        seen[slot] = true;
        Complex* dst[4] = {&m.a, &m.b, &m.c, &m.e};
        *dst[slot] = v;
    }
    return m;
}

std::string serialize_map(const SkewMap& m) {
    std::string s = "SKEWMAP v1\n";
    const std::pair<const char*, Complex> rows[] = {{"a", m.a}, {"b", m.b}, {"c", m.c}, {"e", m.e}};
    for (const auto& [k, v] : rows) s += std::string(k) + ' ' + textfmt::hex(v.real()) + ' ' + textfmt::hex(v.imag()) + '\n';
    return textfmt::seal(std::move(s));
}

SkewMap parse_map_file(std::string_view text) {
    if (text.substr(0, 8) != "SKEWMAP ") return parse_map_spec(trim(text));
    const auto lines = textfmt::unseal(text);
    if (lines.size() != 5 || lines[0] != "SKEWMAP v1") throw FormatError("malformed coefficient file");
    SkewMap m;
    Complex* dst[4] = {&m.a, &m.b, &m.c, &m.e};
    const char* keys[4] = {"a", "b", "c", "e"};
    for (int k = 0; k < 4; ++k) {
        const auto f = textfmt::split_ws(lines[k + 1]);
        if (f.size() != 3 || f[0] != keys[k]) throw FormatError("coefficient file: expected '" + std::string(keys[k]) + "'");
        *dst[k] = {textfmt::parse_double(f[1]), textfmt::parse_double(f[2])};
    }
    return m;
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string map;
    std::string map_file;
    std::string from_model;
    std::string zgrid = "5:10";
    std::string wgrid = "4:8";
    std::string bounds;
    std::string L;
    std::string L_base;
    std::string L_fiber;
    double delta = 0;
    double margin = 0.1;
    std::uint64_t max_boxes = std::uint64_t{1} << 24;
    double max_seconds = 3600;
    unsigned threads = 0;
    int coarse_level = 2;
    std::string out_dir = "skewcert-out";
    std::string config;
};

void add_common(CLI::App* sub, Options& o, bool with_model) {
    sub->add_option("--map", o.map, "coefficients, e.g. a=0,b=0.1,c=0.01,e=0");
    sub->add_option("--map-file", o.map_file, "coefficient file");
    if (with_model) sub->add_option("--from-model", o.from_model, "start from a saved base model");
    sub->add_option("--zgrid", o.zgrid, "base grid level N or range N0:N1")->capture_default_str();
    sub->add_option("--wgrid", o.wgrid, "fiber grid level M or range M0:M1")->capture_default_str();
    sub->add_option("--bounds", o.bounds, "domain half-widths R1,R2");
    sub->add_option("--L", o.L, "expansion constant for base and fiber, or auto");
    sub->add_option("--L-base", o.L_base, "base expansion constant, or auto");
    sub->add_option("--L-fiber", o.L_fiber, "fiber expansion constant, or auto");
    sub->add_option("--delta", o.delta, "neighbourhood inflation")->capture_default_str();
    sub->add_option("--margin", o.margin, "escape-radius margin")->capture_default_str();
    sub->add_option("--max-boxes", o.max_boxes, "box cap")->capture_default_str();
    sub->add_option("--max-seconds", o.max_seconds, "wall-clock cap")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
    sub->add_option("--coarse-level", o.coarse_level, "level every build starts from")->capture_default_str();
    sub->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
    sub->add_option("--config", o.config, "key=value file; the command line wins");
}

LevelRange parse_levels(const std::string& s, const char* what) {
    const auto parts = split(s, ':');
    if (parts.size() > 2) throw UsageError(std::string(what) + ": expected N or N0:N1");
    auto level = [&](const std::string& p) {
        char* end = nullptr;
        const long v = std::strtol(p.c_str(), &end, 10);
        if (p.empty() || end != p.c_str() + p.size()) throw UsageError(std::string(what) + ": bad level '" + p + "'");
        return static_cast<int>(v);
    };
    const int a = level(parts[0]);
    return {a, parts.size() == 2 ? level(parts[1]) : a};
}

std::optional<double> parse_l(const std::string& s) {
    if (s == "auto") return std::nullopt;
    return parse_real(s, "L");
}

VerifyConfig make_config(const Options& o) {
    VerifyConfig c;
    c.base = parse_levels(o.zgrid, "--zgrid");
    c.fiber = parse_levels(o.wgrid, "--wgrid");
    if (!o.L.empty()) c.L_base = c.L_fiber = parse_l(o.L);
    if (!o.L_base.empty()) c.L_base = parse_l(o.L_base);
    if (!o.L_fiber.empty()) c.L_fiber = parse_l(o.L_fiber);
    c.delta = o.delta;
    c.margin = o.margin;
    if (!o.bounds.empty()) {
        const auto r = split(o.bounds, ',');
        if (r.size() != 2) throw UsageError("--bounds: expected R1,R2");
        c.R1 = parse_real(r[0], "--bounds");
        c.R2 = parse_real(r[1], "--bounds");
    }
    c.max_boxes = o.max_boxes;
    c.max_seconds = o.max_seconds;
    c.threads = o.threads;
    c.coarse_level = o.coarse_level;
    c.validate();
    return c;
}

SkewMap resolve_map(const Options& o) {
    if (!o.map.empty() && !o.map_file.empty()) throw UsageError("give --map or --map-file, not both");
    if (!o.map.empty()) return parse_map_spec(o.map);
    if (!o.map_file.empty()) return parse_map_file(textfmt::read_file(o.map_file));
    throw UsageError("a map is required (--map or --map-file)");
}

std::uint64_t build_timestamp() {
    const char* env = std::getenv("SOURCE_DATE_EPOCH");
    if (!env || !*env) return 0;
    try {
        return textfmt::parse_uint(env);
    } catch (const FormatError&) {
        return 0;
    }
}

void save_stamped(ChainModel model, const std::filesystem::path& path) {
    model.provenance.timestamp = build_timestamp();
    save_model(model, path.string());
}

// Appends `--key value` for every config entry not already on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
        if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    }
    if (path.empty()) return args;
    const std::string text = textfmt::read_file(path);
    std::vector<std::string> extra;
    for (const std::string& raw : split(text, '\n')) {
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line '" + line + "' lacks '='");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || key == "config") throw UsageError("bad config key '" + key + "'");
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (!given) {
            extra.push_back(flag);
            extra.push_back(value);
        }
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    const VerifyConfig cfg = make_config(o);
    AxiomAReport rep;
    if (!o.from_model.empty()) {
        if (!o.map.empty() || !o.map_file.empty()) throw UsageError("--from-model carries its own map");
        rep = verify_axiom_a_from(load_model(o.from_model), cfg);
    } else {
        rep = verify_axiom_a(resolve_map(o), cfg);
    }
    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    const std::string text = format_report(rep);
    textfmt::write_file((dir / "report.txt").string(), text);
    textfmt::write_file((dir / "timings.txt").string(), format_timings(rep));
    for (const ConditionOutcome* c : {&rep.condition1, &rep.condition2, &rep.condition3}) {
        for (const TierOutcome& t : c->tiers) {
            if (t.certificate) {
                textfmt::write_file((dir / certificate_file_name(*t.certificate)).string(),
                                    serialize_certificate(*t.certificate));
            }
        }
    }
    if (rep.base_model) save_stamped(*rep.base_model, dir / "base.bcrm");
    if (rep.fiber_model) save_stamped(*rep.fiber_model, dir / "fiber.bcrm");
    out << text;
    if (!rep.verified) err << "not verified at this resolution; blocking stage: " << rep.blocking << '\n';
    return rep.verified ? 0 : 2;
}

int cmd_build(const Options& o, std::ostream& out, std::ostream& err) {
    const VerifyConfig cfg = make_config(o);
    BuiltModels models;
    try {
        models = build_models(resolve_map(o), cfg);
    } catch (const CapExceeded& e) {
        err << "box cap exhausted: " << e.what() << '\n';
        return 2;
    }
    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    save_stamped(models.base, dir / "base.bcrm");
    out << "base level " << models.base.provenance.zgrid.level << ": " << models.base.components.size()
        << " components, " << models.base.box_count() << " boxes, " << models.base.edge_count() << " edges\n";
    if (models.fiber) {
        save_stamped(*models.fiber, dir / "fiber.bcrm");
        out << "fiber levels (" << models.fiber->provenance.zgrid.level << ',' << models.fiber->provenance.wgrid->level
            << "): " << models.fiber->components.size() << " components, " << models.fiber->box_count()
            << " boxes, " << models.fiber->edge_count() << " edges\n";
    }
    return 0;
}

struct RenderOptions {
    std::string model;
    std::string z;
    std::optional<std::uint32_t> z_cell;
    int width = 512;
    int height = 512;
    std::string window;
    std::string out = "fiber.ppm";
};

int cmd_render(const RenderOptions& o, std::ostream& out) {
    const ChainModel model = load_model(o.model);
    RenderSpec spec;
    if (!o.z.empty() && o.z_cell) throw UsageError("give --z or --z-cell, not both");
    if (!o.z.empty()) spec.z_point = parse_complex(o.z);
    spec.z_cell = o.z_cell;
    spec.width = o.width;
    spec.height = o.height;
    if (!o.window.empty()) {
        const auto w = split(o.window, ',');
        if (w.size() != 4) throw UsageError("--window: expected re_lo,re_hi,im_lo,im_hi");
        spec.window = Window{parse_real(w[0], "--window"), parse_real(w[1], "--window"), parse_real(w[2], "--window"),
                             parse_real(w[3], "--window")};
    }
    const FiberImage img = render_fiber(model, spec);
    textfmt::write_file(o.out, img.ppm());
    out << "components " << img.components.size() << ':';
    for (std::size_t c : img.components) out << ' ' << c;
    out << "\nwrote " << o.out << '\n';
    return 0;
}

void emit_map(const SkewMap& m, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << serialize_map(m);
    } else {
        textfmt::write_file(path, serialize_map(m));
        out << "map " << to_string(m) << "\nwrote " << path << '\n';
    }
}

int cmd_inspect(const std::string& path, std::ostream& out) {
    const std::string text = textfmt::read_file(path);
    if (text.rfind("BCRM ", 0) == 0) {
        const ChainModel m = parse_model(text);
        const ModelProvenance& p = m.provenance;
        out << "model " << (m.is_fibered() ? "fibered" : "base") << "\nmap " << to_string(p.map) << "\nzgrid R="
            << p.zgrid.half_width << " level=" << p.zgrid.level << '\n';
        if (p.wgrid) out << "wgrid R=" << p.wgrid->half_width << " level=" << p.wgrid->level << '\n';
        out << "delta " << p.delta << "\ntimestamp " << p.timestamp << "\ndropped " << p.dropped_sources
            << "\ncomponents " << m.components.size() << " boxes " << m.box_count() << " edges " << m.edge_count()
            << '\n';
        for (std::size_t i = 0; i < m.components.size(); ++i) {
            out << "  component " << i << " V=" << m.components[i].vertex_count() << " E=" << m.components[i].edge_count()
                << '\n';
        }
    } else if (text.rfind("CERT ", 0) == 0) {
        const ExpansionCertificate c = parse_certificate(text);
        out << "certificate " << c.tier << "\ncomponent " << c.component_id << " V=" << c.vertex_count
            << " E=" << c.edge_count << "\nkind " << (c.kind == DerivativeKind::base ? "base" : "fiber") << "\nL "
            << c.L << "\nvalidated " << (c.validated ? "true" : "false") << "\nphi min=" << c.stats.min
            << " max=" << c.stats.max << " avg=" << c.stats.avg << '\n';
    } else if (text.rfind("SKEWMAP ", 0) == 0) {
        out << "map " << to_string(parse_map_file(text)) << '\n';
    } else {
        throw FormatError("unrecognised file type");
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Box-chain models and Axiom A certificates for quadratic skew products", "skewcert"};
    app.require_subcommand(1);
    Options o;
    auto* verify = app.add_subcommand("verify", "run the full Axiom A test");
    add_common(verify, o, true);
    auto* build = app.add_subcommand("build", "build the base and fibered models only");
    add_common(build, o, false);

    RenderOptions ro;
    auto* render = app.add_subcommand("render", "draw a fiber slice of a fibered model");
    render->add_option("--model", ro.model, "fibered model file")->required();
    render->add_option("--z", ro.z, "z-point selecting the fiber column");
    render->add_option("--z-cell", ro.z_cell, "explicit z-cell id");
    render->add_option("--width", ro.width)->capture_default_str();
    render->add_option("--height", ro.height)->capture_default_str();
    render->add_option("--window", ro.window, "re_lo,re_hi,im_lo,im_hi");
    render->add_option("--out", ro.out)->capture_default_str();

    auto* generate = app.add_subcommand("generate", "emit coefficient files from the map families");
    generate->require_subcommand(1);
    std::string c_text, c1_text, c2_text, gen_out;
    double sigma = 0, R = 0;
    Prop31Caps caps;
    auto* prop31 = generate->add_subcommand("prop31", "search R and S for a given fiber parameter c");
    prop31->add_option("--c", c_text, "fiber parameter")->required();
    prop31->add_option("--sigma", sigma, "trusted distance from c to the boundary of its component")->required();
    prop31->add_option("--max-R", caps.max_R)->capture_default_str();
    prop31->add_option("--max-S", caps.max_S)->capture_default_str();
    prop31->add_option("--out", gen_out, "output file (stdout when absent)");
    auto* interp = generate->add_subcommand("interp", "interpolate between two fiber parameters");
    interp->add_option("--c1", c1_text)->required();
    interp->add_option("--c2", c2_text)->required();
    interp->add_option("--R", R)->required();
    interp->add_option("--out", gen_out, "output file (stdout when absent)");

    std::string inspect_path;
    auto* inspect = app.add_subcommand("inspect", "summarise a model, certificate or coefficient file");
    inspect->add_option("file", inspect_path)->required();

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
            return 0;
        } catch (const CLI::ParseError& e) {
            err << e.what() << '\n';
            return 1;
        }
        if (verify->parsed()) return cmd_verify(o, out, err);
        if (build->parsed()) return cmd_build(o, out, err);
        if (render->parsed()) return cmd_render(ro, out);
        if (prop31->parsed()) {
            const Prop31Result r = gen_prop31(parse_complex(c_text), sigma, caps);
            emit_map(r.map, gen_out, out);
            err << "R=" << r.params.R << " S=" << r.params.S << '\n';
            return 0;
        }
        if (interp->parsed()) {
            emit_map(gen_interpolating(parse_complex(c1_text), parse_complex(c2_text), R), gen_out, out);
            return 0;
        }
        if (inspect->parsed()) return cmd_inspect(inspect_path, out);
    } catch (const GeneratorError& e) {
        err << "generator caps exhausted: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace skewcert
