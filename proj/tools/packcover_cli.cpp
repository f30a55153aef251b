// Command-line front end: construct periodic ellipse packings, verify and
// render them, and run the disc-packing lower-bound tools.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "packcover/disc_bound.hpp"
#include "packcover/io.hpp"
#include "packcover/periodic_packer.hpp"
#include "packcover/svg.hpp"
#include "packcover/verifier.hpp"

namespace {

using namespace packcover;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text_file(out_path, text);
    }
}

std::vector<Ellipse> bare_ellipses(const PeriodicPacking& p) {
    std::vector<Ellipse> es;
    es.reserve(p.cell.size());
    for (const PlacedEllipse& pe : p.cell) es.push_back(pe.ellipse);
    return es;
}

int run_pack(double lambda, int n_override, const std::string& out) {
    PackingConfig cfg;
    cfg.lambda = lambda;
    if (n_override > 0) cfg.n_override = n_override;
    const PeriodicPacking p = build_cell(cfg);
    emit(write_packing(p), out);
    std::fprintf(stderr, "packed %zu ellipses (n=%d, lambda=%.17g)\n", p.cell.size(), p.n,
                 p.lambda);
    return 0;
}

int run_verify(const std::string& packing_path, double min_cell) {
    const PeriodicPacking p = read_packing(read_text_file(packing_path));
    const std::vector<Ellipse> all = cell_with_neighbors(p, 1);

    const PackingReport pr = verify_packing(all);
    std::printf("packing: %s (%zu ellipses with neighbors, %zu overlapping pairs)\n",
                pr.ok ? "ok" : "FAILED", all.size(), pr.offenders.size());

    const double s = p.triangle_side;
    const Box2 region{{0.0, 0.0}, {1.5 * s, s * std::sqrt(3.0) / 2.0}};
    if (min_cell <= 0.0) min_cell = 1e-3 * s;
    const CoverageReport cr = verify_covering(all, p.lambda, region, min_cell);
    std::printf("covering: %s (min_cell=%.8g, %zu uncovered cells, %zu need refinement)\n",
                cr.certified ? "certified" : "NOT CERTIFIED", min_cell, cr.uncovered_cells.size(),
                cr.needs_refinement_cells.size());
    return (pr.ok && cr.certified) ? 0 : 1;
}

int run_render(const std::string& packing_path, const std::string& out, bool enlarged) {
    const PeriodicPacking p = read_packing(read_text_file(packing_path));
    RenderOptions opt;
    opt.lambda = p.lambda;
    opt.enlarged_outlines = enlarged;
    emit(render_svg(bare_ellipses(p), opt), out);
    return 0;
}

int run_disc_audit(double eps, double alpha, double beta) {
    Constants k;
    k.eps = eps;
    k.alpha = alpha;
    k.beta = beta;
    try {
        k = calibrate(k).constants;
    } catch (const CalibrationError& e) {
        std::fprintf(stderr, "calibration failed at check (%s): %s\n", e.check().c_str(),
                     e.what());
        return 1;
    }
    const AuditReport rep = audit_constants(k);
    std::fputs(audit_report_text(rep).c_str(), stdout);
    return rep.all_pass ? 0 : 1;
}

int run_disc_calibrate() {
    const CalibrationResult cal = calibrate(Constants{});
    std::printf("arc_prime=%.8g\nr_prime_max=%.8g\neps_max=%.8g\n", cal.constants.arc_prime,
                cal.constants.r_prime_max, cal.eps_max);
    return 0;
}

int run_disc_chase(const std::string& packing_path, double eps_flag) {
    DiscPacking packing = read_discs(read_text_file(packing_path));
    if (eps_flag > 0.0) packing.eps = eps_flag;
    Constants k;
    k.eps = packing.eps;
    try {
        k = calibrate(k).constants;
    } catch (const CalibrationError& e) {
        std::fprintf(stderr, "calibration failed at check (%s): %s\n", e.check().c_str(),
                     e.what());
        return 1;
    }
    try {
        const ChaseResult res = chase(packing, {0.0, 0.0}, k);
        std::fputs(chase_trace_text(res.trace).c_str(), stdout);
        std::printf("uncovered: (%.17g, %.17g)\n", res.uncovered.x, res.uncovered.y);
        return 0;
    } catch (const InvariantViolation& e) {
        std::fprintf(stderr, "chase failed: %s\n", e.what());
        return 1;
    }
}

int run_disc_random(std::uint64_t seed, const std::string& out) {
    const DiscPacking p =
        random_greedy_packing(seed, Box2{{-2.0, -2.0}, {2.0, 2.0}}, 0.05, 1.0, 1e-5);
    emit(write_discs(p), out);
    std::fprintf(stderr, "generated %zu discs (seed=%llu)\n", p.discs.size(),
                 static_cast<unsigned long long>(seed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic ellipse packings with covering enlargements, "
                 "and uncovered-point certificates for disc packings"};
    app.require_subcommand(1);

    double lambda = 0.0;
    int n_override = 0;
    std::string out_path;
    std::string packing_path;
    double min_cell = 0.0;
    bool enlarged = false;
    double eps = 1e-5, alpha = kPi / 16.0, beta = 1.0 / 16.0;
    double chase_eps = 0.0;
    std::uint64_t seed = 0;

    CLI::App* pack = app.add_subcommand("pack", "build a periodic packing cell");
    pack->add_option("--lambda", lambda, "enlargement factor, > 1")->required();
    pack->add_option("--n", n_override, "half the polygon vertex count, overrides the default");
    pack->add_option("--out", out_path, "output JSON path (stdout when omitted)");

    CLI::App* verify = app.add_subcommand("verify", "check disjointness and covering of a cell");
    verify->add_option("--packing", packing_path, "packing JSON path")->required();
    verify->add_option("--min-cell", min_cell, "finest verification cell size");

    CLI::App* render = app.add_subcommand("render", "draw a packing as SVG");
    render->add_option("--packing", packing_path, "packing JSON path")->required();
    render->add_option("--out", out_path, "output SVG path")->required();
    render->add_flag("--enlarged", enlarged, "dash the lambda-enlargement outlines");

    CLI::App* audit = app.add_subcommand("disc-audit", "audit the chase constants");
    audit->add_option("--eps", eps, "enlargement factor minus one");
    audit->add_option("--alpha", alpha, "crescent angular window");
    audit->add_option("--beta", beta, "crescent radial thickness");

    app.add_subcommand("disc-calibrate", "derive arc_prime, r_prime_max, and eps_max");

    CLI::App* dchase = app.add_subcommand("disc-chase", "certify an uncovered point");
    dchase->add_option("--packing", packing_path, "disc packing JSON path")->required();
    dchase->add_option("--eps", chase_eps, "override the packing's enlargement factor");

    CLI::App* drandom = app.add_subcommand("disc-random", "generate a greedy random packing");
    drandom->add_option("--seed", seed, "generator seed")->required();
    drandom->add_option("--out", out_path, "output JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (pack->parsed()) return run_pack(lambda, n_override, out_path);
        if (verify->parsed()) return run_verify(packing_path, min_cell);
        if (render->parsed()) return run_render(packing_path, out_path, enlarged);
        if (audit->parsed()) return run_disc_audit(eps, alpha, beta);
        if (dchase->parsed()) return run_disc_chase(packing_path, chase_eps);
        if (drandom->parsed()) return run_disc_random(seed, out_path);
        return run_disc_calibrate();
    } catch (const TileBudgetExceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ConfigurationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
