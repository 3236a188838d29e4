#include "disklab/cli.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "disklab/chains.hpp"
#include "disklab/classify.hpp"
#include "disklab/constructions.hpp"
#include "disklab/realize_grid.hpp"
#include "disklab/shape_io.hpp"
#include "disklab/svg.hpp"

namespace disklab {

namespace {

struct Flags {
    std::string shape, family, out, in, graph, mask, grid, a, b, mode = "hom", scene, svg, compare, manifest;
    int n = 0, m = 0, starts = 32, stretch_n = 0;
    std::uint64_t seed = 0;
    double tau = kDefaultTau;
    double c = 0.0;
    bool convert = false;
};

using Action = std::function<void(std::ostream&)>;

FamilyTag family_flag(const Flags& f) { return parse_family(f.family.empty() ? "sim" : f.family); }

const char* flag01(bool b) { return b ? "1" : "0"; }

// Reads a file, classifying a missing file as an I/O failure of the run.
std::string slurp(const std::string& path) { return read_text_file(path); }

ChainConfig chain_config(const Flags& f) {
    ChainConfig cfg;
    cfg.starts = f.starts;
    cfg.seed = f.seed;
    return cfg;
}

Shape shape_flag(const std::string& spec, const char* name) {
    if (spec.empty()) throw Error(ErrorKind::usage, std::string("--") + name + " is required");
    return parse_shape(spec);
}

void need_positive(int v, const char* name) {
    if (v < 1) throw Error(ErrorKind::usage, std::string("--") + name + " must be a positive integer");
}

// Each prepare_* validates every flag and returns the computation.

Action prepare_shapes(const Flags& f) {
    std::vector<std::string> specs;
    if (!f.shape.empty()) specs.push_back(format_shape(parse_shape(f.shape)));
    else specs = {"circle r=1", "ellipse a=2 b=1", "superellipse p=3", "superellipse p=4",
                  "smoothpoly r=0.10000000000000001 pts=(0,0;1,0;0.29999999999999999,0.59999999999999998)"};
    return [specs](std::ostream& out) {
        out << "shape\tdiameter\tarea\tsigma1_hom\tsigma1_sim_upper\n";
        for (const std::string& spec : specs) {
            const Shape s = parse_shape(spec);
            out << spec << "\t" << format_double(diameter(s)) << "\t" << format_double(moments(s).area) << "\t"
                << format_double(hom_chain_length(s, 1)) << "\t" << format_double(single_disk_upper_bound(s, FamilyTag::sim)) << "\n";
        }
    };
}

Action prepare_stretch(const Flags& f) {
    const Shape shape = shape_flag(f.shape, "shape");
    const FamilyTag family = family_flag(f);
    need_positive(f.n, "n");
    const ChainConfig cfg = chain_config(f);
    return [=](std::ostream& out) {
        const StretchEstimate e = stretch_bounds(shape, family, f.n, cfg);
        for (std::size_t i = 0; i < e.sigma.size(); ++i) out << "n=" << i + 1 << "\tsigma=" << format_double(e.sigma[i]) << "\n";
        out << "sigma1_upper=" << format_double(e.sigma1_upper) << "\tcertified_lower=" << format_double(e.certified_lower)
            << "\theuristic=" << format_double(e.heuristic) << "\twarning=" << flag01(e.warning) << "\n";
        if (!f.out.empty()) write_text_file(f.out, format_chain(e.chains.back()));
    };
}

void print_chain_report(std::ostream& out, const Chain& c) {
    const ChainReport r = chain_check(c);
    out << "disks=" << c.size() << "\tlength=" << format_double(r.length) << "\tvalid=" << flag01(r.valid)
        << "\tstrict=" << flag01(r.strict) << "\twarning=" << flag01(c.warning) << "\n";
    out << "pair\tgap\n";
    for (std::size_t i = 0; i < r.gaps.size(); ++i) out << i + 1 << "-" << i + 2 << "\t" << format_double(r.gaps[i]) << "\n";
    for (const std::string& v : r.violations) out << "violation\t" << v << "\n";
}

Action prepare_chain(const Flags& f) {
    if (!f.in.empty()) {
        if (!f.shape.empty()) throw Error(ErrorKind::usage, "--in and --shape are exclusive");
        return [f](std::ostream& out) {
            const Chain c = parse_chain(slurp(f.in));
            print_chain_report(out, c);
            if (!f.out.empty()) write_text_file(f.out, format_chain(c));
        };
    }
    const Shape shape = shape_flag(f.shape, "shape");
    const FamilyTag family = family_flag(f);
    need_positive(f.n, "n");
    const ChainConfig cfg = chain_config(f);
    return [=](std::ostream& out) {
        const Chain c = max_chain(shape, family, f.n, cfg);
        print_chain_report(out, c);
        if (!f.out.empty()) write_text_file(f.out, format_chain(c));
    };
}

void print_properties(std::ostream& out, const PropertyReport& r) {
    for (std::size_t p = 0; p < r.pass.size(); ++p) out << "property=" << p + 1 << "\tpass=" << flag01(r.pass[p]) << "\n";
    for (const std::string& s : r.failures) out << "failure\t" << s << "\n";
}

Action prepare_construct(const Flags& f) {
    const Shape shape = shape_flag(f.shape, "shape");
    const FamilyTag family = family_flag(f);
    need_positive(f.m, "m");
    need_positive(f.n, "n");
    const ChainConfig cfg = chain_config(f);
    return [=](std::ostream& out) {
        const ConstructionOutput c = build_Gmn(shape, family, f.m, f.n, cfg);
        out << "vertices=" << c.graph.vertices.size() << "\tedges=" << c.graph.edges.size() << "\tm=" << c.m << "\tn=" << c.n
            << "\tk=" << c.k << "\teps=" << format_double(c.eps) << "\tdelta=" << format_double(c.delta) << "\n";
        if (!f.out.empty()) write_text_file(f.out, format_construction(c));
    };
}

Graph graph_from_file(const std::string& path) {
    const std::string text = slurp(path);
    if (text.rfind("gmn ", 0) == 0) return parse_construction(text).graph;
    return parse_graph(text);
}

void print_mismatches(std::ostream& out, const std::vector<Mismatch>& mm) {
    out << "mismatches=" << mm.size() << "\n";
    if (mm.empty()) return;
    out << "a\tb\tkind\tdistance\n";
    for (const Mismatch& x : mm)
        out << format_vertex(x.a) << "\t" << format_vertex(x.b) << "\t" << mismatch_name(x.kind) << "\t" << format_double(x.distance) << "\n";
}

Action prepare_verify(const Flags& f) {
    if (f.in.empty()) throw Error(ErrorKind::usage, "--in is required");
    std::optional<FamilyTag> family;
    if (!f.family.empty()) family = parse_family(f.family);
    return [=](std::ostream& out) {
        const std::string text = slurp(f.in);
        if (text.rfind("realization", 0) == 0) {
            if (f.graph.empty()) throw Error(ErrorKind::usage, "verifying a realization needs --graph");
            const Realization r = parse_realization(text);
            const auto mm = verify_realization(graph_from_file(f.graph), r);
            print_mismatches(out, mm);
            if (!f.out.empty()) write_text_file(f.out, format_realization(r));
            if (!mm.empty()) throw Error(ErrorKind::input, "realization does not realize the graph");
            return;
        }
        const ConstructionOutput c = parse_construction(text);
        const Graph extracted = extract_graph(c.realization);
        const bool same = extracted.edges == c.graph.edges && extracted.vertices == c.graph.vertices;
        out << "vertices=" << c.graph.vertices.size() << "\tstored_edges=" << c.graph.edges.size()
            << "\textracted_edges=" << extracted.edges.size() << "\tmatch=" << flag01(same) << "\n";
        const PropertyReport props = check_properties(c);
        print_properties(out, props);
        if (f.convert) {
            ConversionOptions opt;
            const Realization r = to_realization(c.realization, c.graph, family.value_or(c.family), opt);
            print_mismatches(out, verify_realization(c.graph, r));
            if (!f.out.empty()) write_text_file(f.out, format_realization(r));
        } else if (!f.out.empty()) {
            write_text_file(f.out, format_construction(c));
        }
        if (!same) throw Error(ErrorKind::construction, "stored edges differ from the realization");
        if (!props.all()) throw Error(ErrorKind::construction, "construction properties fail");
    };
}

Action prepare_mask(const Flags& f) {
    if (f.in.empty()) throw Error(ErrorKind::usage, "--in is required");
    return [f](std::ostream& out) {
        const std::string text = slurp(f.in);
        PixelMask mask;
        if (text.rfind("mask ", 0) == 0) {
            mask = parse_mask(text);
        } else {
            const ConstructionOutput c = parse_construction(text);
            mask = pixel_mask(c.graph, c.m);
        }
        out << format_mask(mask) << "count=" << mask.count() << "\n";
        if (!f.out.empty()) write_text_file(f.out, format_mask(mask));
    };
}

MGrid grid_for(const Flags& f, int m) {
    if (f.grid.empty()) return MGrid::uniform(m);
    MGrid g = parse_grid(slurp(f.grid));
    if (g.m() != m) throw Error(ErrorKind::input, "grid has " + std::to_string(g.m()) + " cells per side, mask has " + std::to_string(m));
    return g;
}

Action prepare_reconstruct(const Flags& f) {
    if (f.mask.empty()) throw Error(ErrorKind::usage, "--mask is required");
    std::optional<ShapeSpec> cmp;
    if (!f.compare.empty()) cmp = parse_shape_spec(f.compare);
    if (f.c < 0.0) throw Error(ErrorKind::usage, "--c must be positive");
    return [f, cmp](std::ostream& out) {
        const PixelMask mask = parse_mask(slurp(f.mask));
        const MGrid grid = grid_for(f, mask.m);
        grid.validate();
        const Reconstruction rec = reconstruct_shape(mask, grid);
        out << "cells=" << mask.count() << "\thull_vertices=" << rec.hull.size() << "\tcell_diameter=" << format_double(rec.cell_diameter)
            << "\tbound=" << format_double(2.0 * rec.cell_diameter) << "\n";
        if (cmp) {
            const double d = hausdorff(rec.hull, PlacedShape{share(cmp->shape), cmp->placement});
            out << "hausdorff=" << format_double(d) << "\twithin_bound=" << flag01(d <= 2.0 * rec.cell_diameter) << "\n";
        }
        if (f.c > 0.0) {
            const GridDiagnostics dg = grid_diagnostics(grid, f.c);
            out << "inequality\tvalue\tmargin\tpass\n";
            for (std::size_t i = 0; i < dg.names.size(); ++i)
                out << dg.names[i] << "\t" << format_double(dg.value[i]) << "\t" << format_double(dg.margin[i]) << "\t" << flag01(dg.pass[i]) << "\n";
        }
        out << "x\ty\n";
        for (Vec2 p : rec.hull) out << format_double(p.x) << "\t" << format_double(p.y) << "\n";
        if (!f.svg.empty()) write_text_file(f.svg, render_svg(grid_scene(grid, mask, rec.hull)));
        if (!f.out.empty()) write_text_file(f.out, format_grid(grid));
    };
}

Action prepare_classify(const Flags& f) {
    const Shape a = shape_flag(f.a, "a");
    const Shape b = shape_flag(f.b, "b");
    const Mode mode = parse_mode(f.mode);
    if (!(f.tau > 0.0)) throw Error(ErrorKind::usage, "--tau must be positive");
    if (f.stretch_n == 1 || f.stretch_n < 0) throw Error(ErrorKind::usage, "--stretch-n must be at least 2");
    const ChainConfig cfg = chain_config(f);
    return [=](std::ostream& out) {
        out << format_verdict(classify_pair(a, b, mode, f.tau));
        if (f.stretch_n >= 2) out << stretch_compare(a, b, f.stretch_n, cfg).summary;
    };
}

Action prepare_export(const Flags& f) {
    if (f.out.empty()) throw Error(ErrorKind::usage, "--out is required");
    if (f.scene != "realization" && f.scene != "chain" && f.scene != "grid")
        throw Error(ErrorKind::usage, "--scene must be realization, chain or grid");
    if (f.scene == "grid" ? f.mask.empty() : f.in.empty())
        throw Error(ErrorKind::usage, f.scene == "grid" ? "grid scenes need --mask" : "--in is required");
    return [f](std::ostream& out) {
        SvgScene scene;
        if (f.scene == "realization") {
            const std::string text = slurp(f.in);
            scene = text.rfind("realization", 0) == 0 ? realization_scene(parse_realization(text))
                                                      : realization_scene(parse_construction(text).realization);
        } else if (f.scene == "chain") {
            scene = chain_scene(parse_chain(slurp(f.in)));
        } else {
            const PixelMask mask = parse_mask(slurp(f.mask));
            const MGrid grid = grid_for(f, mask.m);
            grid.validate();
            std::vector<Vec2> hull;
            if (mask.count() > 0) hull = reconstruct_shape(mask, grid).hull;
            scene = grid_scene(grid, mask, hull);
        }
        const std::string svg = render_svg(scene);
        write_text_file(f.out, svg);
        out << "scene=" << f.scene << "\titems=" << scene.items.size() << "\tcells=" << scene.cells.size() << "\tbytes=" << svg.size() << "\n";
    };
}

std::string quote_args(const std::vector<std::string>& args) {
    std::string s;
    for (const std::string& a : args) {
        if (!s.empty()) s += ' ';
        s += '\'';
        for (char c : a) s += c == '\'' ? std::string("'\\''") : std::string(1, c);
        s += '\'';
    }
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    Flags f;
    CLI::App app{"Intersection-graph constructions and shape classification for convex disks", "disklab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.add_option("--manifest", f.manifest, "also write the run manifest to this file");

    auto shape_opt = [&](CLI::App* s) { s->add_option("--shape", f.shape, "shape spec, e.g. \"ellipse a=2 b=1\""); };
    auto family_opt = [&](CLI::App* s) { s->add_option("--family", f.family, "hom, sim or sim_refl (default sim; verify uses the file's family)"); };
    auto search_opts = [&](CLI::App* s) {
        s->add_option("--starts", f.starts, "optimizer starts")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--seed", f.seed, "optimizer seed")->capture_default_str();
    };

    std::vector<std::pair<CLI::App*, std::function<Action(const Flags&)>>> commands;
    auto* shapes = app.add_subcommand("shapes", "basic quantities of built-in or given shapes");
    shape_opt(shapes);
    commands.push_back({shapes, prepare_shapes});

    auto* stretch = app.add_subcommand("stretch", "chain lengths sigma(1..n) and stretch bounds");
    shape_opt(stretch);
    family_opt(stretch);
    stretch->add_option("--n", f.n, "largest chain size")->required();
    search_opts(stretch);
    stretch->add_option("--out", f.out, "write the longest chain");
    commands.push_back({stretch, prepare_stretch});

    auto* chain = app.add_subcommand("chain", "longest n-chain in the unit strip, or check a chain file");
    shape_opt(chain);
    family_opt(chain);
    chain->add_option("--n", f.n, "chain size");
    chain->add_option("--in", f.in, "chain file to check");
    search_opts(chain);
    chain->add_option("--out", f.out, "write the chain");
    commands.push_back({chain, prepare_chain});

    auto* construct = app.add_subcommand("construct", "build the grid construction G_mn with its realization");
    shape_opt(construct);
    family_opt(construct);
    construct->add_option("--m", f.m, "grid size")->required();
    construct->add_option("--n", f.n, "glue size")->required();
    search_opts(construct);
    construct->add_option("--out", f.out, "write the construction");
    commands.push_back({construct, prepare_construct});

    auto* verify = app.add_subcommand("verify", "re-check a construction or a realization file");
    verify->add_option("--in", f.in, "construction or realization file");
    verify->add_option("--graph", f.graph, "graph or construction file (for realizations)");
    verify->add_flag("--convert", f.convert, "convert to a realization by disks and verify it");
    family_opt(verify);
    verify->add_option("--out", f.out, "write the (converted) input");
    commands.push_back({verify, prepare_verify});

    auto* mask = app.add_subcommand("mask", "pixel mask of a construction");
    mask->add_option("--in", f.in, "construction or mask file");
    mask->add_option("--out", f.out, "write the mask");
    commands.push_back({mask, prepare_mask});

    auto* reconstruct = app.add_subcommand("reconstruct", "convex hull of the marked grid cells");
    reconstruct->add_option("--mask", f.mask, "mask file");
    reconstruct->add_option("--grid", f.grid, "grid file (default: uniform)");
    reconstruct->add_option("--compare", f.compare, "placed shape to measure the Hausdorff distance to");
    reconstruct->add_option("--c", f.c, "constant for the grid inequalities");
    reconstruct->add_option("--svg", f.svg, "write a figure");
    reconstruct->add_option("--out", f.out, "write the grid used");
    commands.push_back({reconstruct, prepare_reconstruct});

    auto* classify = app.add_subcommand("classify", "affine or similarity classification of two shapes");
    classify->add_option("--a", f.a, "first shape");
    classify->add_option("--b", f.b, "second shape");
    classify->add_option("--mode", f.mode, "hom or sim")->capture_default_str();
    classify->add_option("--tau", f.tau, "decision threshold")->capture_default_str();
    classify->add_option("--stretch-n", f.stretch_n, "also compare stretch bounds up to this n");
    search_opts(classify);
    commands.push_back({classify, prepare_classify});

    auto* svg = app.add_subcommand("export-svg", "render a scene as SVG");
    svg->add_option("--scene", f.scene, "realization, chain or grid")->required();
    svg->add_option("--in", f.in, "construction, realization or chain file");
    svg->add_option("--mask", f.mask, "mask file (grid scenes)");
    svg->add_option("--grid", f.grid, "grid file (grid scenes)");
    svg->add_option("--out", f.out, "SVG path");
    commands.push_back({svg, prepare_export});

    std::vector<std::string> argv_store{"disklab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& s : argv_store) argv.push_back(s.c_str());

    std::string name;
    auto report = [&](const Error& e) { err << "error:" << error_kind_name(e.kind()) << ": " << e.what() << "\n"; };
    auto execute = [&]() -> int {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::CallForVersion&) {
            out << kVersion << "\n";
            return 0;
        } catch (const CLI::ParseError& e) {
            const std::string what = e.what();
            report(Error(ErrorKind::usage, what.empty() ? "bad command line" : what));
            return 2;
        }
        Action action;
        try {
            for (auto& [cmd, prepare] : commands)
                if (cmd->parsed()) {
                    name = cmd->get_name();
                    action = prepare(f);
                }
        } catch (const Error& e) {
            report(e);
            return 2;
        }
        // stdout only receives complete results
        std::ostringstream buffer;
        int code = 0;
        try {
            action(buffer);
        } catch (const Error& e) {
            report(e);
            code = e.kind() == ErrorKind::usage ? 2 : 1;
        } catch (const std::bad_alloc&) {
            report(Error(ErrorKind::construction, "out of memory"));
            code = 1;
        }
        out << buffer.str();
        return code;
    };
    int code = execute();

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream manifest;
    manifest << "# manifest version=" << kVersion << " command=" << (name.empty() ? "-" : name) << " seed=" << f.seed
             << " starts=" << f.starts << " threads=" << thread_budget() << " wall_time=" << format_double(wall) << " exit=" << code
             << " argv=" << quote_args(args) << "\n";
    err << manifest.str();
    if (!f.manifest.empty()) {
        try {
            write_text_file(f.manifest, manifest.str());
        } catch (const Error& e) {
            report(e);
            if (code == 0) code = 1;
        }
    }
    return code;
}

}  // namespace disklab
