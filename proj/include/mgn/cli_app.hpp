#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "mgn/cache.hpp"
#include "mgn/calculator.hpp"
#include "mgn/expr.hpp"
#include "mgn/selftest.hpp"

namespace mgn {

namespace cli_detail {

inline Rational evaluate_expression(Calculator& calc, const Expression& e) {
    if (expression_is_divisor_monomial(e))
        return calc.divisor.evaluate(expression_to_monomial(e));
    std::vector<int> psi(e.sp.n, 0), kappas, chs, lam;
    for (const auto& f : e.factors) {
        switch (f.kind) {
            case Factor::Psi: psi[f.index - 1] += f.exp; break;
            case Factor::Kappa: kappas.insert(kappas.end(), f.exp, f.index); break;
            case Factor::Ch: chs.insert(chs.end(), f.exp, f.index); break;
            case Factor::Lambda: {
                if (static_cast<int>(lam.size()) < f.index)
                    lam.resize(f.index, 0);
                lam[f.index - 1] += f.exp;
                break;
            }
            default: break;
        }
    }
    for (std::size_t j = 0; j < lam.size(); ++j)
        if (lam[j] > 0 && static_cast<int>(j) + 1 > e.sp.g)
            return Rational{0};  // lambda index above the rank
    return calc.hodge.mixed_number(e.sp.g, e.sp.n, psi, kappas, chs, lam);
}

// deterministic enumeration of degree-d monomials over the class list:
// exponent of the first class descends first
inline void table_monomials(SpaceId sp, int degree, std::vector<Monomial>& out) {
    auto classes = DivisorEngine::enumerate_classes(sp);
    std::vector<int> cur;
    auto rec = [&](auto&& self, std::size_t i, int remaining) -> void {
        if (i == classes.size()) {
            if (remaining != 0)
                return;
            Monomial m = unit_monomial(sp);
            for (std::size_t k = 0; k < classes.size(); ++k) {
                if (cur[k] == 0)
                    continue;
                switch (classes[k].kind) {
                    case DivClass::Psi: m.psi[classes[k].index - 1] += cur[k]; break;
                    case DivClass::Kappa1: m.kappa.emplace_back(1, cur[k]); break;
                    case DivClass::DeltaIrr: m.irr += cur[k]; break;
                    case DivClass::DeltaRed: m.red.emplace_back(classes[k].red, cur[k]); break;
                }
            }
            out.push_back(std::move(m));
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur.push_back(e);
            self(self, i + 1, remaining - e);
            cur.pop_back();
        }
    };
    rec(rec, 0, degree);
}

template <typename Job>
inline void run_jobs(int jobs, std::size_t count, Job&& job) {
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            job(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += jobs)
                job(i);
        });
    for (auto& th : pool)
        th.join();
}

}  // namespace cli_detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact intersection numbers on the moduli spaces of stable curves"};
    app.require_subcommand(1);

    std::string cache_path;
    int jobs = 1;
    app.add_option("--cache", cache_path, "memo cache file to load and save");
    app.add_option("--jobs", jobs, "worker threads for top-level evaluations")
        ->check(CLI::PositiveNumber);

    std::string expr_text;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate one monomial expression");
    cmd_eval->add_option("expression", expr_text, "e.g. \"M(4,0): d_irr^9\"")->required();

    std::string space_text;
    int degree = -1;
    auto* cmd_table = app.add_subcommand("table", "all divisor monomial values on one space");
    cmd_table->add_option("--space", space_text, "space as g,n")->required();
    cmd_table->add_option("--degree", degree, "monomial degree (default: the dimension)");

    int gmax = 2;
    auto* cmd_tau = app.add_subcommand("tau", "export the tau table with all d_i >= 2");
    cmd_tau->add_option("--gmax", gmax, "largest genus")->required();

    int genus = 4;
    auto* cmd_jac = app.add_subcommand("jacobian", "projected Jacobian-locus class");
    cmd_jac->add_option("--genus", genus, "genus (>= 3)")->required();

    std::string filter;
    auto* cmd_self = app.add_subcommand("selftest", "run the acceptance suite");
    cmd_self->add_option("--filter", filter, "only run checks whose name contains this text");

    try {
        std::vector<const char*> argv;
        argv.push_back("mgn");
        for (const auto& a : args)
            argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    Calculator calc;
    if (!cache_path.empty()) {
        std::ifstream in(cache_path);
        if (in) {
            try {
                load_cache(calc.divisor, in);
            } catch (const std::exception& ex) {
                err << "error: " << ex.what() << "\n";
                return 1;
            }
        }
    }
    auto flush_cache = [&] {
        if (cache_path.empty())
            return;
        std::ofstream o(cache_path, std::ios::trunc);
        if (o)
            save_cache(calc.divisor, o);
    };

    int status = 0;
    try {
        if (*cmd_eval) {
            Expression e = parse_expression(expr_text);
            if (expression_degree(e) != e.sp.dim())
                err << "warning: degree " << expression_degree(e) << " != dimension "
                    << e.sp.dim() << "; the value is 0 by convention\n";
            out << fraction_str(cli_detail::evaluate_expression(calc, e)) << "\n";
        } else if (*cmd_table) {
            SpaceId sp;
            if (std::sscanf(space_text.c_str(), "%d,%d", &sp.g, &sp.n) != 2)
                throw std::invalid_argument("--space expects g,n");
            if (!sp.stable())
                throw std::invalid_argument("unstable space: need 2g-2+n > 0");
            const int d = degree < 0 ? sp.dim() : degree;
            if (d != sp.dim())
                err << "warning: degree " << d << " != dimension " << sp.dim()
                    << "; all values are 0 by convention\n";
            std::vector<Monomial> monos;
            cli_detail::table_monomials(sp, d, monos);
            std::vector<std::string> rows(monos.size());
            cli_detail::run_jobs(jobs, monos.size(), [&](std::size_t i) {
                rows[i] = monomial_tokens(monos[i]) + "\t" +
                          fraction_str(calc.divisor.evaluate(monos[i]));
            });
            for (const auto& r : rows)
                out << r << "\n";
        } else if (*cmd_tau) {
            auto rows = calc.tau.export_table(gmax);
            std::vector<std::string> lines(rows.size());
            cli_detail::run_jobs(jobs, rows.size(), [&](std::size_t i) {
                std::string d;
                for (std::size_t k = 0; k < rows[i].d.size(); ++k) {
                    if (k)
                        d += ",";
                    d += std::to_string(rows[i].d[k]);
                }
                lines[i] = std::to_string(rows[i].g) + "\t" + std::to_string(rows[i].n) + "\t" +
                           d + "\t" + fraction_str(rows[i].value);
            });
            for (const auto& l : lines)
                out << l << "\n";
        } else if (*cmd_jac) {
            out << format_class(jacobian_class(genus, calc.hodge)) << "\n";
        } else if (*cmd_self) {
            status = run_acceptance(calc, out, filter) == 0 ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        status = 1;
    }
    flush_cache();  // partial caches are still written
    return status;
}

}  // namespace mgn
