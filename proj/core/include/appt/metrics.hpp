#pragma once

#include "appt/label.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace appt {

/// Overfitting is the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> labels);

/// std::nullopt marks an undefined value (zero denominator).
struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> auc;

    bool operator==(const MetricsReport&) const = default;
};

/// Accuracy, precision, recall and F1 (auc left unset).
MetricsReport basic_metrics(const ConfusionCounts& c);

/// Pairwise AUC: over all M·N (overfitting, correct) pairs, count 1 when
/// the overfitting patch scores higher and 0.5 on ties, divided by M·N.
std::optional<double> auc(std::span<const double> overfitting_scores, std::span<const double> correct_scores);

/// Full report from hard predictions, p_overfitting scores and labels.
MetricsReport evaluate(std::span<const Label> predictions, std::span<const double> p_overfitting,
                       std::span<const Label> labels);

/// Mean of the defined values per metric; undefined when no fold defines it.
MetricsReport average(std::span<const MetricsReport> reports);

/// {"accuracy": .., "precision": .., "recall": .., "f1": .., "auc": ..},
/// null for undefined values.
std::string to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

inline constexpr const char* kMetricsCsvHeader = "accuracy,precision,recall,f1,auc";
/// Five comma-separated values, "null" where undefined.
std::string to_csv_row(const MetricsReport& report);

}  // namespace appt
