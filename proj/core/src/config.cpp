#include "appt/config.hpp"

#include "appt/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace appt {

Reducer parse_reducer(std::string_view name) {
    if (name == "pooled") return Reducer::pooled;
    if (name == "averaged") return Reducer::averaged;
    throw ConfigError("unknown reducer '" + std::string(name) + "' (pooled|averaged)");
}

std::string_view to_string(Reducer reducer) { return reducer == Reducer::pooled ? "pooled" : "averaged"; }

namespace {

template <typename Number>
Number parse_number(std::string_view key, std::string_view text) {
    Number out{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw ConfigError("config key " + std::string(key) + ": cannot parse '" + std::string(text) + "'");
    }
    return out;
}

std::string format(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig() {
    model.encoder.model_dim = 32;
    model.encoder.layers = 2;
    model.encoder.heads = 4;
    model.encoder.ffn_dim = 64;
    model.encoder.max_positions = 0;
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k{
        "model.model_dim",     "model.layers",       "model.heads",        "model.ffn_dim",
        "model.max_positions", "model.attn_dropout", "model.hidden_dropout", "model.fusion",
        "model.lstm_layers",   "model.lstm_hidden",  "model.lstm_output",  "model.head_hidden",
        "model.vocab_entries", "data.dataset",       "data.vocab",         "data.vocab_size",
        "data.max_len",        "data.truncation",    "train.learning_rate", "train.batch_size",
        "train.dropout",       "train.max_epochs",   "train.seed",         "train.folds",
        "train.beta1",         "train.beta2",        "train.eps",          "train.reducer",
        "output.dir"};
    return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    auto size = [&] { return parse_number<std::size_t>(key, value); };
    auto dbl = [&] { return parse_number<double>(key, value); };
    auto& enc = model.encoder;

    if (key == "model.model_dim") enc.model_dim = size();
    else if (key == "model.layers") enc.layers = size();
    else if (key == "model.heads") enc.heads = size();
    else if (key == "model.ffn_dim") enc.ffn_dim = size();
    else if (key == "model.max_positions") enc.max_positions = size();
    else if (key == "model.attn_dropout") enc.attn_dropout = static_cast<real>(dbl());
    else if (key == "model.hidden_dropout") enc.hidden_dropout = static_cast<real>(dbl());
    else if (key == "model.fusion") model.fusion = parse_fusion(value);
    else if (key == "model.lstm_layers") model.lstm_layers = size();
    else if (key == "model.lstm_hidden") model.lstm_hidden = size();
    else if (key == "model.lstm_output") model.lstm_output = size();
    else if (key == "model.head_hidden") model.head_hidden = size();
    else if (key == "model.vocab_entries") vocab_entries = size();
    else if (key == "data.dataset") dataset = value;
    else if (key == "data.vocab") vocab = value;
    else if (key == "data.vocab_size") vocab_size = size();
    else if (key == "data.max_len") max_len = size();
    else if (key == "data.truncation") truncation = parse_truncation(value);
    else if (key == "train.learning_rate") train.learning_rate = dbl();
    else if (key == "train.batch_size") train.batch_size = size();
    else if (key == "train.dropout") train.dropout = dbl();
    else if (key == "train.max_epochs") train.max_epochs = size();
    else if (key == "train.seed") train.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "train.folds") train.folds = size();
    else if (key == "train.beta1") train.beta1 = dbl();
    else if (key == "train.beta2") train.beta2 = dbl();
    else if (key == "train.eps") train.eps = dbl();
    else if (key == "train.reducer") reducer = parse_reducer(value);
    else if (key == "output.dir") output_dir = value;
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

RunConfig RunConfig::parse(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            if (!body.data().empty()) throw ConfigError("config key '" + section + "' is outside any [section]");
            continue;
        }
        for (const auto& [key, node] : body) cfg.set(section + "." + key, node.get_value<std::string>());
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    return parse(in);
}

std::string RunConfig::to_ini() const {
    const auto& enc = model.encoder;
    std::ostringstream out;
    out << "[model]\n"
        << "model_dim = " << enc.model_dim << "\n"
        << "layers = " << enc.layers << "\n"
        << "heads = " << enc.heads << "\n"
        << "ffn_dim = " << enc.ffn_dim << "\n"
        << "max_positions = " << enc.max_positions << "\n"
        << "attn_dropout = " << format(enc.attn_dropout) << "\n"
        << "hidden_dropout = " << format(enc.hidden_dropout) << "\n"
        << "fusion = " << to_string(model.fusion) << "\n"
        << "lstm_layers = " << model.lstm_layers << "\n"
        << "lstm_hidden = " << model.lstm_hidden << "\n"
        << "lstm_output = " << model.lstm_output << "\n"
        << "head_hidden = " << model.head_hidden << "\n"
        << "vocab_entries = " << vocab_entries << "\n"
        << "\n[data]\n"
        << "dataset = " << dataset << "\n"
        << "vocab = " << vocab << "\n"
        << "vocab_size = " << vocab_size << "\n"
        << "max_len = " << max_len << "\n"
        << "truncation = " << to_string(truncation) << "\n"
        << "\n[train]\n"
        << "learning_rate = " << format(train.learning_rate) << "\n"
        << "batch_size = " << train.batch_size << "\n"
        << "dropout = " << format(train.dropout) << "\n"
        << "max_epochs = " << train.max_epochs << "\n"
        << "seed = " << train.seed << "\n"
        << "folds = " << train.folds << "\n"
        << "beta1 = " << format(train.beta1) << "\n"
        << "beta2 = " << format(train.beta2) << "\n"
        << "eps = " << format(train.eps) << "\n"
        << "reducer = " << to_string(reducer) << "\n"
        << "\n[output]\n"
        << "dir = " << output_dir << "\n";
    return out.str();
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write config " + path.string());
    out << to_ini();
}

void RunConfig::validate() const {
    if (max_len < 4) throw ConfigError("max_len must be at least 4");
    train.validate();
    ModelConfig m = model_config(std::max<std::size_t>(vocab_entries, 1));
    m.encoder.validate();
    if (m.encoder.max_positions < max_len) {
        throw ConfigError("max_positions " + std::to_string(m.encoder.max_positions) + " is below max_len " +
                          std::to_string(max_len));
    }
    if (model.lstm_layers == 0) throw ConfigError("lstm_layers must be positive");
}

ModelConfig RunConfig::model_config(std::size_t entries) const {
    ModelConfig m = model;
    m.encoder.vocab_size = entries;
    if (m.encoder.max_positions == 0) m.encoder.max_positions = max_len;
    m.classifier_dropout = static_cast<real>(train.dropout);
    return m;
}

}  // namespace appt
