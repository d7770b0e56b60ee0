#include "appt_cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace appt::cli;

// Shortcut flags that expand to "section.key=value" overrides.
struct RunFlags {
    std::optional<std::string> config;
    std::vector<std::string> sets;
    std::optional<std::string> seed, epochs, lr, batch, fusion, truncation, folds, max_len, vocab, reducer;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config, "Run configuration file (INI sections [model] [data] [train])");
        cmd->add_option("--set", sets, "Override a config key, e.g. --set model.model_dim=64")->take_all();
        cmd->add_option("--seed", seed, "train.seed");
        cmd->add_option("--epochs", epochs, "train.max_epochs");
        cmd->add_option("--lr", lr, "train.learning_rate");
        cmd->add_option("--batch-size", batch, "train.batch_size");
        cmd->add_option("--folds", folds, "train.folds");
        cmd->add_option("--reducer", reducer, "train.reducer: pooled|averaged");
        cmd->add_option("--fusion", fusion, "model.fusion: con|add|sub|pro|mix");
        cmd->add_option("--truncation", truncation, "data.truncation: head|tail|mid|hybrid");
        cmd->add_option("--max-len", max_len, "data.max_len");
        cmd->add_option("--vocab", vocab, "data.vocab: vocabulary file (built per run when omitted)");
    }

    RunOptions resolve() const {
        RunOptions r;
        if (config) r.config_file = *config;
        auto add = [&](const char* key, const std::optional<std::string>& v) {
            if (v) r.overrides.push_back(std::string(key) + "=" + *v);
        };
        add("train.seed", seed);
        add("train.max_epochs", epochs);
        add("train.learning_rate", lr);
        add("train.batch_size", batch);
        add("train.folds", folds);
        add("train.reducer", reducer);
        add("model.fusion", fusion);
        add("data.truncation", truncation);
        add("data.max_len", max_len);
        add("data.vocab", vocab);
        r.overrides.insert(r.overrides.end(), sets.begin(), sets.end());
        return r;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patch correctness prediction: ingest diffs, train, evaluate and ablate"};
    app.require_subcommand(1);
    int status = 0;

    IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Validate diff files / JSONL datasets into one dataset");
    c_ingest->add_option("inputs", ingest.inputs, "Diff files, .jsonl datasets or directories")->required();
    c_ingest->add_option("-o,--out", ingest.out, "Output dataset (JSONL)")->required();
    c_ingest->add_option("--rejects", ingest.rejects, "Rejects file (default <out>.rejects.jsonl)");
    c_ingest->add_option("--label", ingest.label, "Label for every ingested patch");
    c_ingest->callback([&] { status = cmd_ingest(ingest, std::cerr); });

    DedupOptions dedup;
    auto* c_dedup = app.add_subcommand("dedup", "Drop patches identical up to whitespace");
    c_dedup->add_option("dataset", dedup.dataset)->required();
    c_dedup->add_option("-o,--out", dedup.out)->required();
    c_dedup->callback([&] { status = cmd_dedup(dedup, std::cerr); });

    SynthOptions synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a separable synthetic corpus");
    c_synth->add_option("-n,--per-class", synth.per_class, "Patches per class")->check(CLI::PositiveNumber);
    c_synth->add_option("--seed", synth.seed);
    c_synth->add_option("-o,--out", synth.out)->required();
    c_synth->callback([&] { status = cmd_synth(synth, std::cerr); });

    VocabOptions vocab;
    auto* c_vocab = app.add_subcommand("vocab", "Build a subword vocabulary from a dataset");
    c_vocab->add_option("dataset", vocab.dataset)->required();
    c_vocab->add_option("--size", vocab.size, "Target vocabulary size");
    c_vocab->add_option("-o,--out", vocab.out)->required();
    c_vocab->callback([&] { status = cmd_vocab(vocab, std::cerr); });

    TrainOptions train;
    RunFlags train_flags;
    auto* c_train = app.add_subcommand("train", "Train one model on a labelled dataset");
    c_train->add_option("dataset", train.dataset)->required();
    c_train->add_option("-o,--out", train.out, "Model directory")->required();
    train_flags.attach(c_train);
    c_train->callback([&] {
        train.run = train_flags.resolve();
        status = cmd_train(train, std::cerr);
    });

    EvaluateOptions eval;
    RunFlags eval_flags;
    auto* c_eval = app.add_subcommand("evaluate", "Stratified k-fold cross-validation");
    c_eval->add_option("dataset", eval.dataset)->required();
    c_eval->add_option("-o,--out", eval.out, "Report directory")->required();
    eval_flags.attach(c_eval);
    c_eval->callback([&] {
        eval.run = eval_flags.resolve();
        status = cmd_evaluate(eval, std::cerr);
    });

    AblateOptions ablate;
    RunFlags ablate_flags;
    auto* c_ablate = app.add_subcommand("ablate", "Cross-validate every truncation or fusion option");
    c_ablate->add_option("dataset", ablate.dataset)->required();
    c_ablate->add_option("--axis", ablate.axis)->required()->check(CLI::IsMember({"truncation", "fusion"}));
    c_ablate->add_option("-o,--out", ablate.out, "Grid CSV")->required();
    ablate_flags.attach(c_ablate);
    c_ablate->callback([&] {
        ablate.run = ablate_flags.resolve();
        status = cmd_ablate(ablate, std::cerr);
    });

    PredictOptions predict;
    auto* c_predict = app.add_subcommand("predict", "Classify one diff with a trained model");
    c_predict->add_option("-m,--model", predict.model, "Model directory")->required();
    c_predict->add_option("diff", predict.diff)->required();
    c_predict->callback([&] { status = cmd_predict(predict, std::cout, std::cerr); });

    CLI11_PARSE(app, argc, argv);
    return status;
}
