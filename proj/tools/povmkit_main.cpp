// povmkit command line: validate POVMs, build dual frames, compute optimal
// data-processing coefficients and their variances, simulate measurement
// records, and re-run the published worked example end to end.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "povmkit/estimation.hpp"
#include "povmkit/frame.hpp"
#include "povmkit/io.hpp"
#include "povmkit/measurement.hpp"
#include "povmkit/monte_carlo.hpp"
#include "povmkit/reproduce.hpp"

namespace {

using namespace povmkit;

struct CommonArgs {
    std::string povm_path;
    std::string operator_path;
    std::string ensemble_spec = "uniform";
    std::string dual_name = "canonical";
    std::uint64_t shots = 100000;
    std::uint64_t seed = 1;
    bool permissive = false;
    std::string out_path;
};

Povm load_povm(const CommonArgs& args) {
    const OperatorFile file = load_operator_file(args.povm_path);
    std::vector<Matrix> elements;
    elements.reserve(file.operators.size());
    for (const NamedOperator& op : file.operators) {
        elements.push_back(op.matrix);
    }
    return Povm::validate(std::move(elements),
                          args.permissive ? ValidationMode::permissive
                                          : ValidationMode::strict);
}

Ensemble load_ensemble(const CommonArgs& args, int dim) {
    if (args.ensemble_spec == "uniform") {
        return Ensemble::uniform(dim);
    }
    Ensemble ensemble = load_ensemble_file(args.ensemble_spec);
    if (ensemble.dim() != dim) {
        throw DimensionError("ensemble dimension " + std::to_string(ensemble.dim()) +
                             " does not match the POVM dimension " + std::to_string(dim));
    }
    return ensemble;
}

DualKind parse_dual_kind(const std::string& name) {
    if (name == "canonical") {
        return DualKind::canonical;
    }
    if (name == "optimal") {
        return DualKind::optimal;
    }
    throw ValidationError("unknown dual kind \"" + name +
                          "\", expected canonical or optimal");
}

void emit(const CommonArgs& args, const Json& doc) {
    if (!args.out_path.empty()) {
        write_text_file(args.out_path, doc.dump(2) + "\n");
    }
}

Json povm_summary(const Povm& povm) {
    Json j;
    j["dim"] = povm.dim();
    j["elements"] = povm.size();
    j["completeness_defect"] = povm.completeness_defect();
    return j;
}

int run_validate(const CommonArgs& args) {
    const Povm povm = load_povm(args);
    const FrameData frame = build_frame(povm);
    Json doc;
    doc["command"] = "validate";
    doc["povm"] = povm_summary(povm);
    doc["span_rank"] = frame.span_rank;
    const bool complete = frame.span_rank == povm.dim() * povm.dim();
    doc["informationally_complete"] = complete;
    doc["frame_bounds"] = Json::array({frame.bound_lower, frame.bound_upper});
    emit(args, doc);

    std::cout << "POVM: " << povm.size() << " elements on dimension " << povm.dim() << "\n"
              << "completeness defect: " << povm.completeness_defect() << "\n"
              << "span rank: " << frame.span_rank << " of " << povm.dim() * povm.dim()
              << (complete ? " (informationally complete)" : " (NOT informationally complete)")
              << "\n"
              << "frame bounds: [" << frame.bound_lower << ", " << frame.bound_upper << "]\n";
    return 0;
}

int run_duals(const CommonArgs& args) {
    const Povm povm = load_povm(args);
    const Ensemble ensemble = load_ensemble(args, povm.dim());
    const FrameData frame = build_frame(povm);
    const DualFrame can = canonical_dual(frame);
    const GramProjector gram = gram_projector(frame, can);
    const Metric metric = metric_from_ensemble(povm, ensemble);
    const DualFrame opt = optimal_dual(frame, can, gram, metric);
    const MinNormReport res_can = verify_min_norm(frame, can, metric);
    const MinNormReport res_opt = verify_min_norm(frame, opt, metric);

    Json doc;
    doc["command"] = "duals";
    doc["povm"] = povm_summary(povm);
    doc["metric"] = Json::array();
    for (Eigen::Index i = 0; i < metric.diag.size(); ++i) {
        doc["metric"].push_back(metric.diag(i));
    }
    auto dual_block = [](const DualFrame& dual, const MinNormReport& res) {
        Json j;
        j["elements"] = Json::array();
        for (const Matrix& d : dual.duals) {
            j["elements"].push_back(matrix_to_json(d));
        }
        j["traces"] = Json::array();
        for (const Matrix& d : dual.duals) {
            j["traces"].push_back(complex_to_json(d.trace()));
        }
        j["duality_residual"] = res.generalized_inverse;
        j["min_norm_residual"] = res.min_norm;
        return j;
    };
    doc["canonical"] = dual_block(can, res_can);
    doc["optimal"] = dual_block(opt, res_opt);
    emit(args, doc);

    std::cout << "canonical dual: duality residual " << res_can.generalized_inverse
              << ", variance stationarity residual " << res_can.min_norm << "\n"
              << "optimal dual:   duality residual " << res_opt.generalized_inverse
              << ", variance stationarity residual " << res_opt.min_norm << "\n";
    for (std::size_t i = 0; i < opt.duals.size(); ++i) {
        std::cout << "  optimal element " << i + 1 << " trace "
                  << opt.duals[i].trace().real() << "\n";
    }
    return 0;
}

int run_estimate(const CommonArgs& args) {
    const Povm povm = load_povm(args);
    const Ensemble ensemble = load_ensemble(args, povm.dim());
    const OperatorFile operators = load_operator_file(args.operator_path);
    const DualKind kind = parse_dual_kind(args.dual_name);

    Json doc;
    doc["command"] = "estimate";
    doc["povm"] = povm_summary(povm);
    doc["dual"] = args.dual_name;
    doc["targets"] = Json::array();

    for (const NamedOperator& op : operators.operators) {
        const ComparisonReport cmp = compare_duals(op.matrix, povm, ensemble);
        const VarianceReport& chosen =
            kind == DualKind::optimal ? cmp.optimal : cmp.canonical;
        Json j;
        j["name"] = op.name;
        j["sigma"] = chosen.sigma;
        j["moment"] = chosen.moment;
        j["delta"] = chosen.delta;
        j["psi"] = cmp.psi;
        j["epsilon"] = cmp.epsilon;
        doc["targets"].push_back(j);
        std::cout << op.name << ": second moment " << chosen.sigma
                  << ", variance " << chosen.delta
                  << ", reduction " << cmp.psi
                  << ", relative excess " << cmp.epsilon << "\n";
    }
    emit(args, doc);
    return 0;
}

int run_simulate(const CommonArgs& args) {
    const Povm povm = load_povm(args);
    const Ensemble ensemble = load_ensemble(args, povm.dim());
    const OperatorFile operators = load_operator_file(args.operator_path);
    const DualKind kind = parse_dual_kind(args.dual_name);

    const FrameData frame = build_frame(povm);
    const DualFrame can = canonical_dual(frame);
    DualFrame chosen = can;
    if (kind == DualKind::optimal) {
        const GramProjector gram = gram_projector(frame, can);
        const Metric metric = metric_from_ensemble(povm, ensemble);
        chosen = optimal_dual(frame, can, gram, metric);
    }

    SimulationConfig config;
    config.shots = args.shots;
    config.seed = args.seed;
    config.source = StateSource::ensemble_sampled;
    const std::vector<int> outcomes = sample_outcomes(povm, ensemble, config);

    Json doc;
    doc["command"] = "simulate";
    doc["povm"] = povm_summary(povm);
    doc["dual"] = args.dual_name;
    doc["shots"] = args.shots;
    doc["seed"] = args.seed;
    doc["targets"] = Json::array();

    for (const NamedOperator& op : operators.operators) {
        const ProcessingRule rule = coefficients(chosen, op.matrix);
        const EmpiricalReport emp = empirical_estimate(rule, outcomes);
        Json j;
        j["name"] = op.name;
        j["mean_estimate"] = complex_to_json(emp.mean_estimate);
        j["empirical_variance"] = emp.empirical_variance;
        j["standard_error"] = emp.standard_error;
        j["shots"] = emp.shots_used;
        doc["targets"].push_back(j);
        std::cout << op.name << ": estimate " << emp.mean_estimate.real();
        if (std::abs(emp.mean_estimate.imag()) > 1e-12) {
            std::cout << (emp.mean_estimate.imag() < 0 ? " - " : " + ")
                      << std::abs(emp.mean_estimate.imag()) << "i";
        }
        std::cout << " +/- " << emp.standard_error
                  << " (variance " << emp.empirical_variance << ", "
                  << emp.shots_used << " shots)\n";
    }
    emit(args, doc);
    return 0;
}

Json check_to_json(const TargetCheck& check) {
    Json j;
    j["quantity"] = check.quantity;
    j["computed"] = check.computed;
    j["target"] = check.target;
    j["tolerance"] = check.tolerance;
    j["relative"] = check.relative;
    j["hit"] = check.hit;
    return j;
}

Json variant_to_json(const VariantReport& v) {
    Json j;
    j["label"] = v.label;
    j["completeness_defect"] = v.completeness_defect;
    j["sigma_canonical"] = v.sigma_canonical;
    j["psi"] = v.psi;
    j["sigma_optimal"] = v.sigma_optimal;
    j["epsilon"] = v.epsilon;
    j["second_moment"] = v.second_moment;
    j["min_norm_residual_canonical"] = v.min_norm_canonical;
    j["min_norm_residual_optimal"] = v.min_norm_optimal;
    j["coefficients_canonical"] = v.coeffs_canonical;
    j["coefficients_optimal"] = v.coeffs_optimal;
    j["optimal_traces"] = v.optimal_traces;
    j["meets_targets"] = v.meets_targets;
    j["checks"] = Json::array();
    for (const TargetCheck& check : v.checks) {
        j["checks"].push_back(check_to_json(check));
    }
    return j;
}

void print_variant(const VariantReport& v) {
    std::cout << v.label << ":\n"
              << "  completeness defect " << v.completeness_defect << "\n"
              << "  canonical second moment " << v.sigma_canonical
              << "  reduction " << v.psi
              << "  optimal second moment " << v.sigma_optimal
              << "  relative excess " << v.epsilon << "\n";
    for (const TargetCheck& check : v.checks) {
        std::cout << "  " << (check.hit ? "  ok  " : " MISS ") << check.quantity
                  << " = " << check.computed << " vs published " << check.target
                  << (check.relative ? " (rel tol " : " (abs tol ")
                  << check.tolerance << ")\n";
    }
}

int run_reproduce(std::uint64_t shots, std::uint64_t seed, bool no_simulation,
                  const std::string& out_path, const std::string& grid_out,
                  double grid_range, int grid_samples) {
    ReproduceOptions options;
    options.shots = shots;
    options.seed = seed;
    options.run_simulation = !no_simulation;
    const ReproduceReport report = run_reproduction(options);

    print_variant(report.as_printed);
    for (const VariantReport& v : report.variants) {
        print_variant(v);
    }
    if (report.matching_variant) {
        std::cout << "variant " << report.variants[*report.matching_variant].label
                  << " meets every published target\n";
    } else {
        std::cout << "no variant meets every published target\n";
    }
    for (const Discrepancy& d : report.discrepancies) {
        std::cout << "discrepancy: " << d.quantity << " = " << d.computed
                  << " vs published " << d.target << "; cause: " << d.cause << "\n";
    }
    if (report.simulation) {
        const SimulationComparison& sim = *report.simulation;
        std::cout << "simulation (" << sim.variant_label << ", " << sim.shots
                  << " shots, seed " << sim.seed << "):\n"
                  << "  canonical second moment " << sim.empirical_canonical
                  << " vs analytic " << sim.analytic_canonical << " (se "
                  << sim.error_canonical << ", "
                  << (sim.canonical_consistent ? "consistent" : "INCONSISTENT") << ")\n"
                  << "  optimal   second moment " << sim.empirical_optimal
                  << " vs analytic " << sim.analytic_optimal << " (se "
                  << sim.error_optimal << ", "
                  << (sim.optimal_consistent ? "consistent" : "INCONSISTENT") << ")\n"
                  << "  variance reduction t-statistic " << sim.reduction_t_stat
                  << (sim.reduction_significant ? " (significant at 99%)"
                                                : " (NOT significant)")
                  << "\n";
    }

    if (!grid_out.empty()) {
        const ReferenceExample& ex = reference_example();
        // Grid on the element list whose numbers match the published ones;
        // the published list itself if no variant does.
        std::vector<Matrix> elements = ex.povm_elements;
        if (report.matching_variant) {
            elements = conjugated_variant(
                ex.povm_elements,
                report.variants[*report.matching_variant].conjugated.front());
        }
        const Povm povm = Povm::validate(elements, ValidationMode::permissive);
        GridOptions grid_options;
        grid_options.range = grid_range;
        grid_options.samples = grid_samples;
        const std::vector<GridPoint> points =
            epsilon_grid(povm, Ensemble::uniform(povm.dim()), grid_options);
        write_text_file(grid_out, format_grid_tsv(points, grid_options));
        std::cout << "wrote " << points.size() << " grid points to " << grid_out << "\n";
    }

    if (!out_path.empty()) {
        Json doc;
        doc["command"] = "reproduce-paper";
        doc["as_published"] = variant_to_json(report.as_printed);
        doc["variants"] = Json::array();
        for (const VariantReport& v : report.variants) {
            doc["variants"].push_back(variant_to_json(v));
        }
        if (report.matching_variant) {
            doc["matching_variant"] = report.variants[*report.matching_variant].label;
        } else {
            doc["matching_variant"] = nullptr;
        }
        doc["discrepancies"] = Json::array();
        for (const Discrepancy& d : report.discrepancies) {
            Json j;
            j["quantity"] = d.quantity;
            j["computed"] = d.computed;
            j["target"] = d.target;
            j["tolerance"] = d.tolerance;
            j["relative"] = d.relative;
            j["cause"] = d.cause;
            doc["discrepancies"].push_back(j);
        }
        if (report.simulation) {
            const SimulationComparison& sim = *report.simulation;
            Json j;
            j["variant"] = sim.variant_label;
            j["shots"] = sim.shots;
            j["seed"] = sim.seed;
            j["empirical_canonical"] = sim.empirical_canonical;
            j["analytic_canonical"] = sim.analytic_canonical;
            j["standard_error_canonical"] = sim.error_canonical;
            j["canonical_consistent"] = sim.canonical_consistent;
            j["empirical_optimal"] = sim.empirical_optimal;
            j["analytic_optimal"] = sim.analytic_optimal;
            j["standard_error_optimal"] = sim.error_optimal;
            j["optimal_consistent"] = sim.optimal_consistent;
            j["reduction_t_stat"] = sim.reduction_t_stat;
            j["reduction_significant"] = sim.reduction_significant;
            doc["simulation"] = j;
        }
        write_text_file(out_path, doc.dump(2) + "\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"POVM dual-frame toolkit: optimal data-processing "
                 "coefficients for quantum measurement statistics"};
    app.require_subcommand(1);

    CommonArgs args;

    auto add_povm = [&](CLI::App* cmd) {
        cmd->add_option("--povm", args.povm_path, "POVM operator file")->required();
        cmd->add_flag("--permissive", args.permissive,
                      "record a completeness defect instead of rejecting it");
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", args.out_path, "write a JSON report to this path");
    };
    auto add_ensemble = [&](CLI::App* cmd) {
        cmd->add_option("--ensemble", args.ensemble_spec,
                        "\"uniform\" or an ensemble file path (default uniform)");
    };

    CLI::App* validate = app.add_subcommand(
        "validate", "check POVM structure, completeness and span");
    add_povm(validate);
    add_out(validate);

    CLI::App* duals = app.add_subcommand(
        "duals", "canonical and variance-optimal dual frames");
    add_povm(duals);
    add_ensemble(duals);
    add_out(duals);

    CLI::App* estimate = app.add_subcommand(
        "estimate", "variances of the processed estimator for target operators");
    add_povm(estimate);
    add_ensemble(estimate);
    estimate->add_option("--operator", args.operator_path, "target operator file")
        ->required();
    estimate->add_option("--dual", args.dual_name, "canonical or optimal");
    add_out(estimate);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "sample measurement records and process them");
    add_povm(simulate);
    add_ensemble(simulate);
    simulate->add_option("--operator", args.operator_path, "target operator file")
        ->required();
    simulate->add_option("--dual", args.dual_name, "canonical or optimal");
    simulate->add_option("--shots", args.shots, "number of outcomes to draw");
    simulate->add_option("--seed", args.seed, "random seed");
    add_out(simulate);

    std::uint64_t rp_shots = 1000000;
    std::uint64_t rp_seed = 1;
    bool rp_no_sim = false;
    std::string rp_out;
    std::string rp_grid_out;
    double rp_grid_range = 3.0;
    int rp_grid_samples = 61;
    CLI::App* reproduce = app.add_subcommand(
        "reproduce-paper", "re-run the published worked example end to end");
    reproduce->add_option("--shots", rp_shots, "simulation shots");
    reproduce->add_option("--seed", rp_seed, "simulation seed");
    reproduce->add_flag("--no-simulation", rp_no_sim, "analytic checks only");
    reproduce->add_option("--out", rp_out, "write a JSON report to this path");
    reproduce->add_option("--grid-out", rp_grid_out,
                          "also emit the relative-excess grid to this TSV path");
    reproduce->add_option("--grid-range", rp_grid_range, "grid half-width (default 3)");
    reproduce->add_option("--grid-samples", rp_grid_samples,
                          "grid samples per axis (default 61)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help lands here too with exit code 0; keep that, but fold the
        // library's assorted usage-error codes into the documented parse code.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) {
            return run_validate(args);
        }
        if (duals->parsed()) {
            return run_duals(args);
        }
        if (estimate->parsed()) {
            return run_estimate(args);
        }
        if (simulate->parsed()) {
            return run_simulate(args);
        }
        if (reproduce->parsed()) {
            return run_reproduce(rp_shots, rp_seed, rp_no_sim, rp_out, rp_grid_out,
                                 rp_grid_range, rp_grid_samples);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
