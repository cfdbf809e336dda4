#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "pbica/errors.hpp"
#include "pbica/fastica.hpp"
#include "pbica/metrics.hpp"
#include "pbica/nonlinearity.hpp"
#include "pbica/preprocess.hpp"
#include "pbica/score.hpp"
#include "pbica/synth.hpp"

namespace pbica {

struct ExperimentConfig {
    std::vector<Scenario> scenarios;       // seed field ignored; derived per trial
    std::vector<NlKind> nonlinearities;
    int n_trials = 100;
    std::uint64_t master_seed = 1;
    ScoreParams pbecf;
    FasticaConfig fastica;
    std::string output_dir = ".";
};

struct TrialRecord {
    std::string scenario;
    std::string nonlinearity;
    int trial = 0;
    bool failed = false;
    std::string reason;
    double amari = 0.0;
    int iterations = 0;
    bool converged = false;
    double max_orth_residual = 0.0;
    double tabulation_seconds = 0.0;
    double iteration_seconds = 0.0;
    double total_seconds = 0.0;
};

// Every stream a trial uses hangs off this one value, so all nonlinearities
// within a trial see the identical dataset, W0, and score-learning dither.
inline std::uint64_t trial_seed(std::uint64_t master, const std::string& scenario_id,
                                int trial) {
    return derive_seed(derive_seed(master, scenario_id), "trial",
                       static_cast<std::uint64_t>(trial));
}

inline TrialRecord run_trial(const Scenario& sc_template, NlKind kind,
                             const ScoreParams& pbecf, const FasticaConfig& fic,
                             std::uint64_t tseed) {
    TrialRecord rec;
    rec.scenario = sc_template.id;
    rec.nonlinearity = nl_kind_name(kind);
    auto t_start = std::chrono::steady_clock::now();
    try {
        Scenario sc = sc_template;
        sc.seed = derive_seed(tseed, "data");
        Dataset ds = make_dataset(sc);
        auto [Xc, mean] = center(ds.X);
        auto [Xw, model] = whiten(Xc);

        Nonlinearity nl;
        if (kind == NlKind::learned) {
            auto t0 = std::chrono::steady_clock::now();
            ScoreTable table = tabulate_score(Xw, pbecf, derive_seed(tseed, "score"));
            rec.tabulation_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            nl = Nonlinearity::learned(std::move(table));
        } else {
            nl = Nonlinearity::fixed(kind);
        }

        FasticaConfig cfg = fic;
        cfg.seed = derive_seed(tseed, "w0");
        SeparationResult res = run_fastica(Xw, nl, cfg);
        rec.iterations = res.iterations;
        rec.converged = res.converged;
        rec.max_orth_residual = res.max_orth_residual;
        rec.iteration_seconds = res.elapsed;
        rec.amari = amari_error(gain_matrix(res.W, model.V, ds.A));
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.reason = e.what();
    }
    rec.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

struct SummaryRow {
    std::string scenario;
    std::string nonlinearity;
    int n = 0;
    int failures = 0;
    double amari_median = 0.0, amari_q1 = 0.0, amari_q3 = 0.0, amari_mean = 0.0;
    double convergence_rate = 0.0;
    double iterations_median = 0.0;
    double tabulation_median = 0.0;
    double total_median = 0.0;
};

inline std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
    std::vector<SummaryRow> rows;
    for (const TrialRecord& r : records) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) {
            return s.scenario == r.scenario && s.nonlinearity == r.nonlinearity;
        });
        if (it == rows.end()) {
            rows.push_back(SummaryRow{r.scenario, r.nonlinearity});
            it = rows.end() - 1;
        }
        ++it->n;
        if (r.failed) ++it->failures;
    }
    for (SummaryRow& s : rows) {
        std::vector<double> am, iter, tab, tot;
        int conv = 0, ok = 0;
        for (const TrialRecord& r : records) {
            if (r.scenario != s.scenario || r.nonlinearity != s.nonlinearity || r.failed)
                continue;
            ++ok;
            am.push_back(r.amari);
            iter.push_back(r.iterations);
            tab.push_back(r.tabulation_seconds);
            tot.push_back(r.total_seconds);
            if (r.converged) ++conv;
        }
        std::sort(am.begin(), am.end());
        std::sort(iter.begin(), iter.end());
        std::sort(tab.begin(), tab.end());
        std::sort(tot.begin(), tot.end());
        if (ok > 0) {
            s.amari_median = quantile_sorted(am, 0.5);
            s.amari_q1 = quantile_sorted(am, 0.25);
            s.amari_q3 = quantile_sorted(am, 0.75);
            double sum = 0.0;
            for (double v : am) sum += v;
            s.amari_mean = sum / ok;
            s.convergence_rate = static_cast<double>(conv) / ok;
            s.iterations_median = quantile_sorted(iter, 0.5);
            s.tabulation_median = quantile_sorted(tab, 0.5);
            s.total_median = quantile_sorted(tot, 0.5);
        }
    }
    return rows;
}

inline void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& os) {
    os << "scenario,nonlinearity,trial,amari_error,iterations,converged,"
          "max_orth_residual,tabulation_seconds,iteration_seconds,total_seconds,"
          "failed,reason\n";
    os.precision(17);
    for (const TrialRecord& r : records) {
        std::string reason = r.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        os << r.scenario << ',' << r.nonlinearity << ',' << r.trial << ',' << r.amari << ','
           << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.max_orth_residual
           << ',' << r.tabulation_seconds << ',' << r.iteration_seconds << ','
           << r.total_seconds << ',' << (r.failed ? 1 : 0) << ',' << reason << '\n';
    }
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& os) {
    os << "scenario,nonlinearity,n,failures,amari_median,amari_q1,amari_q3,amari_mean,"
          "convergence_rate,iterations_median,tabulation_seconds_median,"
          "total_seconds_median\n";
    os.precision(10);
    for (const SummaryRow& s : rows)
        os << s.scenario << ',' << s.nonlinearity << ',' << s.n << ',' << s.failures << ','
           << s.amari_median << ',' << s.amari_q1 << ',' << s.amari_q3 << ','
           << s.amari_mean << ',' << s.convergence_rate << ',' << s.iterations_median << ','
           << s.tabulation_median << ',' << s.total_median << '\n';
}

struct CampaignResult {
    std::vector<TrialRecord> records;
    std::vector<SummaryRow> summary;
};

inline CampaignResult run_campaign(const ExperimentConfig& cfg) {
    if (cfg.n_trials < 1) throw input_error("run_campaign: n_trials must be >= 1");
    if (cfg.scenarios.empty()) throw input_error("run_campaign: no scenarios");
    if (cfg.nonlinearities.empty()) throw input_error("run_campaign: no nonlinearities");
    CampaignResult out;
    for (const Scenario& sc : cfg.scenarios) {
        for (int t = 0; t < cfg.n_trials; ++t) {
            std::uint64_t tseed = trial_seed(cfg.master_seed, sc.id, t);
            for (NlKind kind : cfg.nonlinearities) {
                TrialRecord rec = run_trial(sc, kind, cfg.pbecf, cfg.fastica, tseed);
                rec.trial = t;
                out.records.push_back(std::move(rec));
            }
        }
    }
    out.summary = summarize(out.records);
    return out;
}

inline void write_campaign(const CampaignResult& res, const std::string& output_dir) {
    std::ofstream trials(output_dir + "/trials.csv");
    if (!trials) throw input_error("cannot write to output dir: " + output_dir);
    write_trials_csv(res.records, trials);
    std::ofstream summary(output_dir + "/summary.csv");
    if (!summary) throw input_error("cannot write to output dir: " + output_dir);
    write_summary_csv(res.summary, summary);
}

}  // namespace pbica
