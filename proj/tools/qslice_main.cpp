#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qslice/report.hpp"
#include "qslice/stats.hpp"
#include "qslice/tangency.hpp"
#include "qslice/variety.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 0xB3271;

struct GlobalOpts {
    std::string out;
    std::string format = "json";
    int threads = 1;
    std::uint64_t max_points = qslice::Budget{}.max_points;
    std::uint64_t max_subspaces = qslice::Budget{}.max_subspaces;
    std::uint64_t max_pairs = qslice::Budget{}.max_pairs;

    qslice::Budget budget() const {
        qslice::Budget b;
        b.max_points = max_points;
        b.max_subspaces = max_subspaces;
        b.max_pairs = max_pairs;
        b.threads = threads;
        return b;
    }
};

void write_text(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qslice::InputError("cannot open output file '" + path + "'");
    out << content;
}

void emit(const GlobalOpts& g, const qslice::Json& json, const std::string& csv) {
    if (g.format == "json") {
        write_text(g.out, json.dump(2) + "\n");
    } else {
        write_text(g.out, csv);
    }
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            std::size_t pos = 0;
            int v = std::stoi(item, &pos);
            if (pos != item.size() || v < 1) throw std::invalid_argument("level");
            out.push_back(v);
        } catch (const std::exception&) {
            throw qslice::InputError("bad N-list entry '" + item + "'");
        }
    }
    if (out.empty()) throw qslice::InputError("empty N-list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"intersection statistics of random linear subspaces with varieties over finite fields"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--out", g.out, "output path (default: stdout)");
    app.add_option("--format", g.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--max-points", g.max_points, "projective point enumeration budget");
    app.add_option("--max-subspaces", g.max_subspaces, "subspace enumeration budget");
    app.add_option("--max-pairs", g.max_pairs, "point-pair budget for the fast path");

    // formula
    int f_d = 0, f_e = 1;
    auto* cmd_formula = app.add_subcommand("formula", "closed-form limit probabilities");
    cmd_formula->add_option("--d", f_d, "degree of X")->required()->check(CLI::PositiveNumber);
    cmd_formula->add_option("--e", f_e, "degree of the slicing family")->check(CLI::PositiveNumber);

    // exact
    std::string x_spec;
    int x_N = 1;
    auto* cmd_exact = app.add_subcommand("exact", "exact intersection histogram at one level");
    cmd_exact->add_option("--spec", x_spec, "variety spec file")->required();
    cmd_exact->add_option("--N", x_N, "extension level")->required()->check(CLI::PositiveNumber);

    // mc
    std::string m_spec;
    int m_N = 1;
    std::uint64_t m_samples = 0, m_seed = kDefaultSeed;
    auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo intersection histogram");
    cmd_mc->add_option("--spec", m_spec, "variety spec file")->required();
    cmd_mc->add_option("--N", m_N, "extension level")->required()->check(CLI::PositiveNumber);
    cmd_mc->add_option("--samples", m_samples, "number of subspace samples")->required();
    cmd_mc->add_option("--seed", m_seed, "rng seed");

    // converge
    std::string c_spec, c_levels, c_plot;
    std::optional<int> c_mc_above;
    std::uint64_t c_samples = 10000, c_seed = kDefaultSeed;
    auto* cmd_converge = app.add_subcommand("converge", "per-level deviations from the limit");
    cmd_converge->add_option("--spec", c_spec, "variety spec file")->required();
    cmd_converge->add_option("--N-list", c_levels, "comma-separated levels, e.g. 1,2,3")->required();
    cmd_converge->add_option("--mc-above", c_mc_above, "levels above this use Monte Carlo");
    cmd_converge->add_option("--samples", c_samples, "samples per Monte Carlo level");
    cmd_converge->add_option("--seed", c_seed, "rng seed");
    cmd_converge->add_option("--plot", c_plot, "write (q^N, deviation) plot data here");

    // tangency
    std::string t_spec;
    int t_trials = 5, t_levels = 2;
    std::uint64_t t_seed = kDefaultSeed;
    auto* cmd_tangency = app.add_subcommand("tangency", "simple tangency search");
    cmd_tangency->add_option("--spec", t_spec, "variety spec file")->required();
    cmd_tangency->add_option("--trials", t_trials, "slicing trials for dim >= 2");
    cmd_tangency->add_option("--levels", t_levels, "extension levels to scan");
    cmd_tangency->add_option("--seed", t_seed, "rng seed");

    // mu
    std::string u_spec;
    int u_N = 1;
    auto* cmd_mu = app.add_subcommand("mu", "slice irreducibility density");
    cmd_mu->add_option("--spec", u_spec, "variety spec file")->required();
    cmd_mu->add_option("--N", u_N, "extension level")->required()->check(CLI::PositiveNumber);

    // probe-conjecture
    std::string p_spec;
    int p_N = 1;
    std::uint64_t p_samples = 0, p_seed = kDefaultSeed;
    auto* cmd_probe = app.add_subcommand("probe-conjecture", "irreducible-conic probe of the degree-e limit");
    cmd_probe->add_option("--spec", p_spec, "variety spec file")->required();
    cmd_probe->add_option("--N", p_N, "extension level")->required()->check(CLI::PositiveNumber);
    cmd_probe->add_option("--samples", p_samples, "accepted irreducible samples")->required();
    cmd_probe->add_option("--seed", p_seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const qslice::Budget budget = g.budget();

        if (cmd_formula->parsed()) {
            emit(g, qslice::formula_json(f_d, f_e), qslice::formula_csv(f_d, f_e));
            return 0;
        }
        if (cmd_exact->parsed()) {
            qslice::Variety var(qslice::VarietySpec::parse_file(x_spec));
            qslice::ConvergenceRow row{qslice::exact_distribution(var, x_N, budget), 0};
            row.deviation = qslice::deviation_from_limit(row.hist, var.spec().d);
            std::vector<qslice::ConvergenceRow> rows;
            rows.push_back(std::move(row));
            auto limit = qslice::limit_vector(var.spec().d);
            emit(g, qslice::levels_report_json(var.spec(), rows, limit),
                 qslice::levels_report_csv(var.spec(), rows, limit));
            return 0;
        }
        if (cmd_mc->parsed()) {
            qslice::Variety var(qslice::VarietySpec::parse_file(m_spec));
            qslice::ConvergenceRow row{qslice::mc_distribution(var, m_N, m_samples, m_seed, budget), 0};
            row.deviation = qslice::deviation_from_limit(row.hist, var.spec().d);
            std::vector<qslice::ConvergenceRow> rows;
            rows.push_back(std::move(row));
            auto limit = qslice::limit_vector(var.spec().d);
            emit(g, qslice::levels_report_json(var.spec(), rows, limit),
                 qslice::levels_report_csv(var.spec(), rows, limit));
            return 0;
        }
        if (cmd_converge->parsed()) {
            qslice::Variety var(qslice::VarietySpec::parse_file(c_spec));
            auto levels = parse_levels(c_levels);
            auto report = qslice::convergence_report(var, levels, c_mc_above, c_samples, c_seed, budget);
            emit(g, qslice::levels_report_json(var.spec(), report.rows, report.limit),
                 qslice::levels_report_csv(var.spec(), report.rows, report.limit));
            std::string plot_path = c_plot;
            if (plot_path.empty() && !g.out.empty()) plot_path = g.out + ".plot";
            if (!plot_path.empty()) write_text(plot_path, qslice::plot_data(var, report.rows));
            return 0;
        }
        if (cmd_tangency->parsed()) {
            qslice::Variety var(qslice::VarietySpec::parse_file(t_spec));
            const auto& spec = var.spec();
            qslice::TangencyReport report;
            if (spec.m == 1) {
                if (spec.n != 2 || var.forms().size() != 1)
                    throw qslice::InputError("tangency for dim-1 X expects one plane-curve form");
                report = qslice::curve_has_simple_tangency(var.forms()[0], t_levels, budget);
            } else {
                report = qslice::variety_has_simple_tangency(var, t_trials, t_levels, t_seed, budget);
            }
            const qslice::FieldCtx& wf =
                report.found ? var.field_at(report.level) : var.base();
            emit(g, qslice::tangency_json(spec, report, wf, var.base()),
                 qslice::tangency_csv(report));
            return 0;
        }
        if (cmd_mu->parsed()) {
            qslice::Variety var(qslice::VarietySpec::parse_file(u_spec));
            auto report = qslice::slice_irreducibility_density(var, u_N, budget);
            emit(g, qslice::mu_json(var.spec(), report), qslice::mu_csv(report));
            return 0;
        }
        if (cmd_probe->parsed()) {
            qslice::Variety var(qslice::VarietySpec::parse_file(p_spec));
            auto probe = qslice::conjecture_probe(var, 2, p_N, p_samples, p_seed, budget);
            emit(g, qslice::probe_json(var.spec(), probe), qslice::probe_csv(probe));
            return 0;
        }
        throw qslice::InternalError("no subcommand dispatched");
    } catch (const qslice::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const qslice::BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const qslice::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
