#include "appt_cli/commands.hpp"

#include <appt/dataset.hpp>
#include <appt/errors.hpp>
#include <appt/metrics.hpp>
#include <appt/patch.hpp>
#include <appt/pipeline.hpp>
#include <appt/synth.hpp>
#include <appt/tokenizer.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace appt::cli {
namespace {

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::string number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

bool is_dataset_file(const fs::path& p) { return p.extension() == ".jsonl"; }
bool is_diff_file(const fs::path& p) { return p.extension() == ".diff" || p.extension() == ".patch"; }

void write_loss_csv(const fs::path& path, const std::vector<LossRecord>& log) {
    auto out = open_out(path);
    out << "epoch,step,loss\n";
    for (const auto& r : log) out << r.epoch << ',' << r.step << ',' << number(r.loss) << '\n';
}

}  // namespace

RunConfig resolve_config(const RunOptions& options) {
    RunConfig cfg = options.config_file ? RunConfig::load(*options.config_file) : RunConfig{};
    for (const auto& kv : options.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not of the form section.key=value");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

int cmd_ingest(const IngestOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        std::optional<Label> forced;
        if (opt.label) {
            forced = parse_label(*opt.label);
            if (!forced) throw ConfigError("--label must be correct or overfitting");
        }

        struct Source {
            fs::path path;
            std::string id;
        };
        std::vector<Source> sources;
        for (const auto& input : opt.inputs) {
            if (!fs::exists(input)) throw IoError("input path does not exist: " + input.string());
            if (fs::is_directory(input)) {
                std::vector<fs::path> found;
                for (const auto& entry : fs::recursive_directory_iterator(input)) {
                    if (entry.is_regular_file() && (is_diff_file(entry.path()) || is_dataset_file(entry.path()))) {
                        found.push_back(entry.path());
                    }
                }
                std::sort(found.begin(), found.end());
                for (const auto& p : found) sources.push_back({p, fs::relative(p, input).generic_string()});
            } else {
                sources.push_back({input, input.filename().generic_string()});
            }
        }

        std::vector<RawPatch> accepted;
        std::vector<nlohmann::ordered_json> rejects;
        std::set<std::string> ids;
        auto consider = [&](RawPatch patch, const std::string& origin) {
            std::string reason;
            if (!ids.insert(patch.id).second) {
                reason = "duplicate id";
            } else {
                try {
                    parse_unified_diff(patch.diff_text);
                } catch (const MalformedDiff& e) {
                    reason = e.what();
                }
            }
            if (reason.empty()) {
                accepted.push_back(std::move(patch));
            } else {
                nlohmann::ordered_json r;
                r["id"] = patch.id;
                r["source"] = origin;
                r["reason"] = reason;
                rejects.push_back(std::move(r));
            }
        };

        for (const auto& src : sources) {
            if (is_dataset_file(src.path)) {
                for (auto& p : read_dataset(src.path)) {
                    if (forced) p.label = forced;
                    consider(std::move(p), src.path.generic_string());
                }
            } else {
                RawPatch p{src.id, read_file(src.path), forced};
                if (!p.label) p.label = parse_label(src.path.parent_path().filename().string());
                consider(std::move(p), src.path.generic_string());
            }
        }

        const fs::path rejects_path = opt.rejects ? *opt.rejects : fs::path(opt.out.string() + ".rejects.jsonl");
        {
            auto out = open_out(rejects_path);
            for (const auto& r : rejects) out << r.dump() << '\n';
        }
        if (accepted.empty()) {
            log << "error: no valid patches among " << sources.size() << " input(s); " << rejects.size()
                << " rejected (see " << rejects_path.string() << ")\n";
            return 1;
        }
        {
            auto out = open_out(opt.out);
            write_dataset(out, accepted);
        }
        log << "ingested " << accepted.size() << " patch(es), rejected " << rejects.size() << '\n';
        return 0;
    });
}

int cmd_dedup(const DedupOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto data = read_dataset(opt.dataset);
        const auto kept = deduplicate(data);
        auto out = open_out(opt.out);
        write_dataset(out, kept);
        log << "kept " << kept.size() << " of " << data.size() << " patch(es)\n";
        return 0;
    });
}

int cmd_synth(const SynthOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto data = synthesize_dataset(opt.per_class, opt.seed);
        auto out = open_out(opt.out);
        write_dataset(out, data);
        log << "wrote " << data.size() << " synthetic patch(es)\n";
        return 0;
    });
}

int cmd_vocab(const VocabOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto data = read_dataset(opt.dataset);
        const auto texts = corpus_texts(data);
        const auto vocab = build_vocab(texts, opt.size);
        if (opt.out.has_parent_path()) fs::create_directories(opt.out.parent_path());
        vocab.save(opt.out);
        log << "vocabulary of " << vocab.size() << " entries\n";
        return 0;
    });
}

int cmd_train(const TrainOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        RunConfig cfg = resolve_config(opt.run);
        cfg.dataset = opt.dataset.generic_string();
        cfg.output_dir = opt.out.generic_string();
        const auto data = read_dataset(opt.dataset);
        const auto trained = train_model(data, cfg, cfg.train.seed);
        save_model(opt.out, trained);
        trained.config.save(opt.out / "config.ini");
        write_loss_csv(opt.out / "loss.csv", trained.loss_log);
        log << "trained on " << data.size() << " patch(es), " << trained.loss_log.size() << " step(s)";
        if (!trained.loss_log.empty()) log << ", final batch loss " << number(trained.loss_log.back().loss);
        log << '\n';
        return 0;
    });
}

namespace {

CrossValidation run_cv(const std::vector<RawPatch>& data, const RunConfig& cfg, std::ostream& log) {
    return cross_validate(data, cfg, [&](const FoldOutcome& f) {
        log << "fold " << f.fold << ": train " << f.train.size() << ", test " << f.test.size() << ", accuracy "
            << (f.report.accuracy ? number(*f.report.accuracy) : "null") << '\n';
    });
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        RunConfig cfg = resolve_config(opt.run);
        cfg.dataset = opt.dataset.generic_string();
        cfg.output_dir = opt.out.generic_string();
        const auto data = read_dataset(opt.dataset);
        const auto cv = run_cv(data, cfg, log);

        fs::create_directories(opt.out);
        cfg.save(opt.out / "config.ini");
        auto audit = open_out(opt.out / "folds.csv");
        audit << "fold,role,index,id\n";
        auto preds = open_out(opt.out / "predictions.csv");
        preds << "fold,id,label,predicted,p_overfitting\n";
        for (const auto& f : cv.folds) {
            open_out(opt.out / ("fold" + std::to_string(f.fold) + ".json")) << to_json(f.report) << '\n';
            write_loss_csv(opt.out / ("loss_fold" + std::to_string(f.fold) + ".csv"), f.loss_log);
            for (auto i : f.train) audit << f.fold << ",train," << i << ',' << data[i].id << '\n';
            for (std::size_t k = 0; k < f.test.size(); ++k) {
                const auto& p = data[f.test[k]];
                audit << f.fold << ",test," << f.test[k] << ',' << p.id << '\n';
                preds << f.fold << ',' << p.id << ',' << to_string(*p.label) << ','
                      << to_string(f.predictions[k].label) << ',' << number(f.predictions[k].p_overfitting) << '\n';
            }
        }
        open_out(opt.out / "pooled.json") << to_json(cv.pooled) << '\n';
        open_out(opt.out / "averaged.json") << to_json(cv.averaged) << '\n';
        open_out(opt.out / "report.json") << to_json(cv.reduced(cfg.reducer)) << '\n';
        log << to_string(cfg.reducer) << " report: " << to_csv_row(cv.reduced(cfg.reducer)) << '\n';
        return 0;
    });
}

int cmd_ablate(const AblateOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig base = resolve_config(opt.run);
        std::vector<std::string> options;
        if (opt.axis == "truncation") {
            for (auto t : kAllTruncations) options.emplace_back(to_string(t));
        } else if (opt.axis == "fusion") {
            for (auto m : kAllFusionModes) options.emplace_back(to_string(m));
        } else {
            throw ConfigError("ablation axis must be truncation or fusion, got '" + opt.axis + "'");
        }
        const auto data = read_dataset(opt.dataset);
        const std::string key = opt.axis == "truncation" ? "data.truncation" : "model.fusion";

        std::vector<std::string> rows;
        for (const auto& option : options) {
            RunConfig cfg = base;
            cfg.dataset = opt.dataset.generic_string();
            cfg.set(key, option);
            log << opt.axis << " = " << option << '\n';
            const auto cv = run_cv(data, cfg, log);
            rows.push_back(option + ',' + to_csv_row(cv.reduced(cfg.reducer)));
        }
        auto out = open_out(opt.out);
        out << opt.axis << ',' << kMetricsCsvHeader << '\n';
        for (const auto& r : rows) out << r << '\n';
        log << "wrote " << rows.size() << " row(s) to " << opt.out.string() << '\n';
        return 0;
    });
}

int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& log) {
    return guarded(log, [&] {
        const auto trained = load_model(opt.model);
        const RawPatch patch{opt.diff.filename().string(), read_file(opt.diff), std::nullopt};
        const auto p = predict_patch(trained, patch);
        nlohmann::ordered_json obj;
        obj["label"] = std::string(to_string(p.label));
        obj["p_overfitting"] = p.p_overfitting;
        out << obj.dump() << '\n';
        return 0;
    });
}

}  // namespace appt::cli
