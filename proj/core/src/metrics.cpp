#include "appt/metrics.hpp"

#include "appt/errors.hpp"

#include <json.hpp>

#include <charconv>

namespace appt {
namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> labels) {
    if (predictions.size() != labels.size()) {
        throw DataError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(labels.size()) + " labels");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool predicted_pos = predictions[i] == Label::overfitting;
        const bool actual_pos = labels[i] == Label::overfitting;
        if (predicted_pos && actual_pos) ++c.tp;
        else if (predicted_pos) ++c.fp;
        else if (actual_pos) ++c.fn;
        else ++c.tn;
    }
    return c;
}

MetricsReport basic_metrics(const ConfusionCounts& c) {
    MetricsReport r;
    r.accuracy = ratio(c.tp + c.tn, c.total());
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    if (r.precision && r.recall && (*r.precision + *r.recall) > 0) {
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    }
    return r;
}

std::optional<double> auc(std::span<const double> overfitting_scores, std::span<const double> correct_scores) {
    const std::size_t m = overfitting_scores.size(), n = correct_scores.size();
    if (m == 0 || n == 0) return std::nullopt;
    // Twice the indicator sum stays integral, so ties add no rounding.
    unsigned long long twice = 0;
    for (double po : overfitting_scores) {
        for (double pc : correct_scores) {
            if (po > pc) twice += 2;
            else if (po == pc) twice += 1;
        }
    }
    return static_cast<double>(twice) / (2.0 * static_cast<double>(m) * static_cast<double>(n));
}

MetricsReport evaluate(std::span<const Label> predictions, std::span<const double> p_overfitting,
                       std::span<const Label> labels) {
    if (p_overfitting.size() != labels.size()) throw DataError("evaluate: score count differs from label count");
    MetricsReport r = basic_metrics(confusion(predictions, labels));
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == Label::overfitting ? pos : neg).push_back(p_overfitting[i]);
    }
    r.auc = auc(pos, neg);
    return r;
}

MetricsReport average(std::span<const MetricsReport> reports) {
    auto mean = [&](std::optional<double> MetricsReport::*field) -> std::optional<double> {
        double total = 0;
        std::size_t count = 0;
        for (const auto& r : reports) {
            if (r.*field) {
                total += *(r.*field);
                ++count;
            }
        }
        if (count == 0) return std::nullopt;
        return total / static_cast<double>(count);
    };
    return {mean(&MetricsReport::accuracy), mean(&MetricsReport::precision), mean(&MetricsReport::recall),
            mean(&MetricsReport::f1), mean(&MetricsReport::auc)};
}

std::string to_json(const MetricsReport& report) {
    nlohmann::ordered_json obj;
    auto put = [&](const char* key, const std::optional<double>& v) {
        obj[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    put("accuracy", report.accuracy);
    put("precision", report.precision);
    put("recall", report.recall);
    put("f1", report.f1);
    put("auc", report.auc);
    return obj.dump(2);
}

MetricsReport report_from_json(const std::string& text) {
    const auto obj = nlohmann::json::parse(text);
    auto get = [&](const char* key) -> std::optional<double> {
        if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
        return obj[key].get<double>();
    };
    return {get("accuracy"), get("precision"), get("recall"), get("f1"), get("auc")};
}

std::string to_csv_row(const MetricsReport& report) {
    std::string out;
    for (const auto* v : {&report.accuracy, &report.precision, &report.recall, &report.f1, &report.auc}) {
        if (!out.empty()) out += ',';
        out += *v ? format_number(**v) : "null";
    }
    return out;
}

}  // namespace appt
