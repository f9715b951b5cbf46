#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ifsarc/ifsarc.hpp"

using namespace ifsarc;

namespace {

struct Globals {
    std::size_t budget = default_point_budget;
    int search_bound = 64;
    std::uint64_t seed = 1;
    std::string format = "text";
};

// A readable file is an IFS document; anything else is looked up in the gallery.
IfsPath load_input(const std::string& input) {
    std::ifstream f(input);
    if (f) {
        std::stringstream ss;
        ss << f.rdbuf();
        return load_ifs(ss.str());
    }
    return gallery_entry(input).make();
}

void emit(const AnalysisReport& r, const Globals& g) { std::cout << (g.format == "structured" ? to_structured(r) : to_text(r)); }

void write_output(const std::string& text, const std::string& file) {
    if (file.empty() || file == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + file);
    out << text;
}

AnalysisReport param_report(const IfsPath& path, double t, double tol) {
    const ParamPoint p = eval_phi(normalize(path), t, tol);
    AnalysisReport r{"param", Verdict::Info, {}, {}};
    r.set("t", t, Provenance::Exact);
    for (std::size_t k = 0; k < p.value.size(); ++k) r.set("x" + std::to_string(k + 1), p.value[k], Provenance::Numeric);
    r.set("error", p.error, Provenance::CertifiedUpperBound);
    r.set("address", p.address.to_string());
    return r;
}

AnalysisReport holder_report(const IfsPath& path, int g, std::size_t budget) {
    const auto h = holder_profile(normalize(path), g, budget);
    AnalysisReport r{"holder", Verdict::Info, {}, {}};
    r.set("generation", h.generation);
    r.set("pairs", static_cast<std::int64_t>(h.pairs));
    r.set("sup_ratio", h.sup_ratio, Provenance::Numeric);
    r.set("inf_ratio", h.inf_ratio, Provenance::Numeric);
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterated function system paths: validation, arc and quasiarc checks, rendering"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--budget", g.budget, "maximum number of curve points per stage");
    app.add_option("--search-bound", g.search_bound, "bound on exponents in power searches");
    app.add_option("--seed", g.seed, "seed for sampled checks");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"text", "structured"}));

    std::string input;
    auto with_input = [&](CLI::App* sub) {
        sub->add_option("input", input, "IFS document file or gallery name")->required();
        return sub;
    };

    auto* validate = with_input(app.add_subcommand("validate", "check the chaining and contraction conditions"));
    auto* normal = with_input(app.add_subcommand("normalize", "print the normalized IFS document"));
    auto* dimension = with_input(app.add_subcommand("dimension", "similarity dimension"));

    int render_gen = 5;
    std::string out_file;
    SvgOptions svg;
    auto* render = with_input(app.add_subcommand("render", "SVG of T^k(I)"));
    render->add_option("--generation", render_gen)->check(CLI::NonNegativeNumber);
    render->add_option("-o,--output", out_file);
    render->add_flag("--color-copies", svg.color_copies);
    render->add_flag("--junctions", svg.junction_markers);
    render->add_option("--width", svg.width);

    int arc_gen = 30;
    auto* check_arc = with_input(app.add_subcommand("check-arc", "certify an arc or find a coincidence"));
    check_arc->add_option("--max-generation", arc_gen);

    auto* check_quasi = with_input(app.add_subcommand("check-quasiarc", "end-map conditions, cone containment and bounded turning"));
    int bt_gen = 7;
    check_quasi->add_option("--generation", bt_gen);
    auto* bt = with_input(app.add_subcommand("bt", "bounded turning constants"));
    bt->add_option("--generation", bt_gen);

    double eval_t = 0.5, tol = 1e-10;
    std::size_t samples = 0;
    auto* param = with_input(app.add_subcommand("param", "evaluate the Hutchinson parameterization"));
    param->add_option("--eval", eval_t)->check(CLI::Range(0.0, 1.0));
    param->add_option("--tol", tol)->check(CLI::PositiveNumber);
    param->add_option("--samples", samples, "write CSV of this many uniform samples instead");
    param->add_option("-o,--output", out_file);

    int holder_gen = 6;
    std::size_t scatter = 0;
    auto* holder = with_input(app.add_subcommand("holder", "Hölder profile of vertex pairs"));
    holder->add_option("--generation", holder_gen);
    holder->add_option("--scatter", scatter, "write CSV of this many random pairs instead");
    holder->add_option("-o,--output", out_file);

    int non_arc_gen = 8;
    auto* non_arc = with_input(app.add_subcommand("non-arc", "non-arc criteria and loop search"));
    non_arc->add_option("--generation", non_arc_gen);

    auto* gal = app.add_subcommand("gallery", "built-in examples");
    gal->require_subcommand(1);
    gal->fallthrough();
    auto* gal_list = gal->add_subcommand("list", "list entries");
    auto* gal_show = gal->add_subcommand("show", "print an entry as an IFS document");
    gal_show->add_option("name", input)->required();
    auto* gal_run = gal->add_subcommand("run", "run the pipeline and compare with the expected properties");
    gal_run->add_option("name", input)->required();

    bool record_time = false;
    auto* pipeline = with_input(app.add_subcommand("pipeline", "all stages"));
    pipeline->add_flag("--time", record_time, "record seconds per stage");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            emit(validate_path(load_input(input)), g);
        } else if (normal->parsed()) {
            std::cout << serialize_ifs(normalize(load_input(input)));
        } else if (dimension->parsed()) {
            const auto d = similarity_dimension(load_input(input));
            AnalysisReport r{"dimension", Verdict::Info, {}, {}};
            r.set("s", d.s, Provenance::Numeric);
            r.set("residual", d.residual, Provenance::Numeric);
            emit(r, g);
        } else if (render->parsed()) {
            write_output(render_svg(iterate(normalize(load_input(input)), render_gen, g.budget), svg), out_file);
        } else if (check_arc->parsed()) {
            ArcOptions o;
            o.max_generation = arc_gen;
            o.budget = g.budget;
            emit(certify_arc(normalize(load_input(input)), o).report(), g);
        } else if (check_quasi->parsed()) {
            const IfsPath p = normalize(load_input(input));
            AnalysisReport r{"quasiarc", Verdict::Undecided, {}, {}};
            r.add(check_theorem14(p, g.search_bound).report());
            try {
                r.add(check_cone_containment(p, 6, g.budget));
            } catch (const Error& e) {
                AnalysisReport c{"cone_containment", Verdict::Error, {}, {}};
                c.set("error", std::string(e.what()));
                r.add(std::move(c));
            }
            QuasiarcOptions qo;
            qo.budget = g.budget;
            qo.seed = g.seed;
            r.add(bt_constant(p, bt_gen, qo).report());
            r.verdict = r.children[0].verdict;
            emit(r, g);
        } else if (bt->parsed()) {
            QuasiarcOptions qo;
            qo.budget = g.budget;
            qo.seed = g.seed;
            emit(bt_constant(normalize(load_input(input)), bt_gen, qo).report(), g);
        } else if (param->parsed()) {
            const IfsPath p = load_input(input);
            if (samples > 0) write_output(phi_samples_csv(normalize(p), samples, tol), out_file);
            else emit(param_report(p, eval_t, tol), g);
        } else if (holder->parsed()) {
            const IfsPath p = load_input(input);
            if (scatter > 0) write_output(holder_scatter_csv(normalize(p), holder_gen, scatter, g.seed, g.budget), out_file);
            else emit(holder_report(p, holder_gen, g.budget), g);
        } else if (non_arc->parsed()) {
            const IfsPath p = normalize(load_input(input));
            AnalysisReport r = check_thm18_conditions(p, g.search_bound, non_arc_gen, g.budget);
            if (r.verdict != Verdict::Fail) {
                LoopOptions lo;
                lo.budget = g.budget;
                if (const auto w = find_loop_witness(p, g.search_bound, lo)) r.add(w->report());
            }
            emit(r, g);
        } else if (gal_list->parsed()) {
            for (const auto& e : gallery()) std::cout << e.name << "\t" << e.description << "\n";
        } else if (gal_show->parsed()) {
            std::cout << serialize_ifs(gallery_entry(input).make());
        } else if (gal_run->parsed()) {
            const auto& e = gallery_entry(input);
            PipelineConfig cfg;
            cfg.budget = g.budget;
            cfg.search_bound = g.search_bound;
            cfg.seed = g.seed;
            const AnalysisReport r = run_pipeline(e.make(), cfg);
            emit(r, g);
            const auto bad = check_expectations(e, r);
            for (const auto& b : bad) std::cerr << "mismatch: " << b << "\n";
            return bad.empty() ? 0 : 1;
        } else if (pipeline->parsed()) {
            PipelineConfig cfg;
            cfg.budget = g.budget;
            cfg.search_bound = g.search_bound;
            cfg.seed = g.seed;
            cfg.record_time = record_time;
            emit(run_pipeline(load_input(input), cfg), g);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
