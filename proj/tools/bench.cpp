#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "indirect/counting_new.hpp"
#include "indirect/experiments.hpp"

int main(int argc, char** argv)
{
    using namespace indirect;
    CLI::App app{"Delaunay benchmark over indirect predicates"};

    std::string experiment = "1.1";
    std::string cache = "interval";
    std::string out;
    std::string force_stage;
    std::string dump;
    bench::ExperimentConfig cfg;

    app.add_option("--experiment", experiment, "1.1 | 1.2 | 1.3 | 2.1 | 2.2 | 2.3")
        ->required()
        ->check(CLI::IsMember({"1.1", "1.2", "1.3", "2.1", "2.2", "2.3"}));
    app.add_option("--n", cfg.n_points, "number of points")->required()->check(CLI::Range(3, 100000000));
    app.add_option("--implicit-pct", cfg.implicit_pct, "percentage of implicit points")
        ->check(CLI::Range(0, 100));
    app.add_option("--cache", cache, "lambda cache level")->check(CLI::IsMember({"none", "fp", "interval", "exact"}));
    app.add_option("--seed", cfg.seed, "generator and insertion-order seed");
    app.add_option("--out", out, "CSV file to append to")->required();
    bool verify = false;
    app.add_flag("--verify", verify, "check the Delaunay property with exact predicates");
    app.add_option("--force-stage", force_stage, "first predicate stage")
        ->check(CLI::IsMember({"fp", "interval", "exact"}));
    app.add_option("--dump-points", dump, "write the generated point set");

    CLI11_PARSE(app, argc, argv);

    try
    {
        cfg.experiment = bench::parse_experiment(experiment);
        cfg.cache = bench::parse_cache(cache);
        cfg.verify = verify;
        if (!force_stage.empty())
            cfg.force_stage = bench::parse_stage(force_stage);
        if (!cfg.has_implicit_points() && cfg.implicit_pct != 0)
        {
            std::cerr << "note: experiment " << experiment << " has no implicit points; using 0%\n";
            cfg.implicit_pct = 0;
        }

        const auto pts = bench::generate(cfg);
        if (!dump.empty())
        {
            std::ofstream d(dump);
            bench::write_points(d, pts);
        }
        const auto rep = bench::run(pts, cfg);

        const bool fresh = !std::filesystem::exists(out) || std::filesystem::file_size(out) == 0;
        std::ofstream os(out, std::ios::app);
        if (!os)
        {
            std::cerr << "cannot open " << out << '\n';
            return 2;
        }
        if (fresh)
            os << bench::csv_header << '\n';
        os << bench::csv_row(rep) << '\n';
        std::cout << bench::csv_row(rep) << '\n';
        if (!rep.error.empty())
        {
            std::cerr << "error: " << rep.error << '\n';
            return 1;
        }
        if (rep.verified && !*rep.verified)
        {
            std::cerr << "verification failed\n";
            return 1;
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
