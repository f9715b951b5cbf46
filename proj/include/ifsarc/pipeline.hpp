#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "arc_topology.hpp"
#include "cone.hpp"
#include "dimension.hpp"
#include "hutchinson.hpp"
#include "non_arc.hpp"
#include "quasiarc.hpp"
#include "report.hpp"
#include "theorem14.hpp"

namespace ifsarc {

struct PipelineConfig {
    std::size_t budget = default_point_budget;
    int search_bound = 64;
    std::uint64_t seed = 1;
    int arc_max_generation = 30;
    std::size_t arc_budget = 1'000'000;  // arc certification alone; non-arcs otherwise refine until the main budget runs out
    int cone_generation = 6;
    int ds_generation = 6;
    int bt_generation = 7;
    int holder_generation = 6;
    int non_arc_generation = 8;
    bool loop_search = true;
    bool record_time = false;  // wall-clock seconds per stage; off by default so reports are reproducible
};

/// validate → normalize → dimension → certify_arc → theorem14 → cone → D_S → bounded turning → Hölder → non-arc
/// criteria. The end-map and cone stages depend only on the maps and always run; the metric stages need a certified
/// arc and are skipped otherwise. The non-arc criteria run for planar paths that are not certified arcs, and the
/// loop search runs when those criteria do not fail. A stage that throws is recorded as ERROR with its message.
/// The top-level verdict is the arc verdict, upgraded to NON_ARC_WITNESS by a loop witness.
inline AnalysisReport run_pipeline(const IfsPath& input, const PipelineConfig& cfg = {}) {
    AnalysisReport out{"pipeline", Verdict::Undecided, {}, {}};
    auto stage = [&](const std::string& name, const std::function<AnalysisReport()>& body) -> const AnalysisReport& {
        const auto t0 = std::chrono::steady_clock::now();
        AnalysisReport r;
        try {
            r = body();
        } catch (const std::exception& e) {
            r = AnalysisReport{name, Verdict::Error, {}, {}};
            r.set("error", std::string(e.what()));
        }
        r.name = name;
        if (cfg.record_time) r.set("seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), Provenance::Numeric);
        out.add(std::move(r));
        return out.children.back();
    };
    auto skipped = [&](const std::string& name, const std::string& why) {
        AnalysisReport r{name, Verdict::Skipped, {}, {}};
        r.set("reason", why);
        out.add(std::move(r));
    };

    const AnalysisReport& valid = stage("validate", [&] { return validate_path(input); });
    if (valid.verdict != Verdict::Pass) {
        out.verdict = valid.verdict == Verdict::Error ? Verdict::Error : Verdict::Fail;
        for (const char* s : {"normalize", "dimension", "certify_arc", "theorem14", "cone_containment", "separation", "bounded_turning", "holder",
                              "non_arc"})
            skipped(s, "path did not validate");
        return out;
    }
    std::optional<IfsPath> path;
    stage("normalize", [&] {
        AnalysisReport r{"normalize", Verdict::Info, {}, {}};
        r.set("already_normalized", is_normalized(input));
        path = normalize(input);
        r.set("exact", path->is_exact());
        return r;
    });
    if (!path) {
        out.verdict = Verdict::Error;
        return out;
    }
    const IfsPath& p = *path;

    stage("dimension", [&] {
        const auto d = similarity_dimension(p);
        AnalysisReport r{"dimension", Verdict::Info, {}, {}};
        r.set("s", d.s, Provenance::Numeric);
        r.set("residual", d.residual, Provenance::Numeric);
        return r;
    });

    std::optional<ArcCertificate> cert;
    stage("certify_arc", [&] {
        ArcOptions o;
        o.max_generation = cfg.arc_max_generation;
        o.budget = std::min(cfg.budget, cfg.arc_budget);
        cert = certify_arc(p, o);
        return cert->report();
    });
    const bool arc = cert && cert->verdict == Verdict::CertifiedArc;
    out.verdict = cert ? cert->verdict : Verdict::Error;

    const bool planar = p.dim() == 2;
    stage("theorem14", [&] { return check_theorem14(p, cfg.search_bound).report(); });
    if (planar) stage("cone_containment", [&] { return check_cone_containment(p, cfg.cone_generation, cfg.budget); });
    else skipped("cone_containment", "needs a planar path");

    QuasiarcOptions qo;
    qo.budget = cfg.budget;
    qo.seed = cfg.seed;
    qo.assume_arc = true;  // the certificate above already screened the path
    std::optional<BtReport> bt;
    if (arc) {
        stage("separation", [&] {
            // Refine from ds_generation until the lower bound settles, as the bounded turning stage does.
            const auto d = detail::ds_scan(p, cfg.ds_generation, std::max(cfg.ds_generation, qo.ds_max_level), cfg.budget, true);
            if (d.lower <= 0) throw DegenerateError("D_S lower bound did not become positive by level " + std::to_string(d.generation));
            AnalysisReport r{"separation", Verdict::Info, {}, {}};
            r.set("generation", d.generation);
            r.set("D_S_lower", d.lower, Provenance::CertifiedLowerBound);
            r.set("D_S_estimate", d.estimate, Provenance::Numeric);
            return r;
        });
        stage("bounded_turning", [&] {
            bt = bt_constant(p, cfg.bt_generation, qo);
            return bt->report();
        });
        stage("holder", [&] {
            const auto h = holder_profile(p, cfg.holder_generation, cfg.budget);
            AnalysisReport r{"holder", Verdict::Info, {}, {}};
            r.set("generation", h.generation);
            r.set("pairs", static_cast<std::int64_t>(h.pairs));
            r.set("sup_ratio", h.sup_ratio, Provenance::Numeric);
            r.set("inf_ratio", h.inf_ratio, Provenance::Numeric);
            if (bt && bt->ds.lower > 0) {
                const double upper = 2 * bt->diam / bt->ds.lower, lower = bt->ds.lower / (2 * bt->c_triple);
                r.set("upper_constant", upper, Provenance::Numeric);
                r.set("lower_constant", lower, Provenance::Numeric);
                r.verdict = h.sup_ratio <= upper && h.inf_ratio >= lower ? Verdict::Pass : Verdict::Fail;
            }
            return r;
        });
    } else {
        const std::string why = cert ? "arc not certified" : "arc certification failed";
        skipped("separation", why);
        skipped("bounded_turning", why);
        skipped("holder", why);
    }

    if (!planar) {
        skipped("non_arc", "needs a planar path");
    } else if (arc) {
        skipped("non_arc", "certified arc");
    } else {
        stage("non_arc", [&] {
            AnalysisReport r = check_thm18_conditions(p, cfg.search_bound, cfg.non_arc_generation, cfg.budget);
            if (cfg.loop_search && r.verdict != Verdict::Fail) {
                if (const auto w = find_loop_witness(p, cfg.search_bound)) {
                    r.add(w->report());
                    out.verdict = Verdict::NonArcWitness;
                } else {
                    AnalysisReport none{"loop_witness", Verdict::Undecided, {}, {}};
                    none.set("note", "no crossing found up to the search bound");
                    r.add(std::move(none));
                }
            }
            return r;
        });
    }
    return out;
}

}  // namespace ifsarc
