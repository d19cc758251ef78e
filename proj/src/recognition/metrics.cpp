// Precision, recall, F1, AUPRC and threshold sweeps.

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "mlnec/error.hpp"
#include "mlnec/recognition.hpp"

namespace mlnec {

namespace {

void finish(MetricsReport& r) {
  r.precision = r.tp + r.fp == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.recall = r.tp + r.fn == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
}

}  // namespace

MetricsReport& MetricsReport::operator+=(const MetricsReport& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  auprc.reset();
  finish(*this);
  return *this;
}

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn, double threshold) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  r.threshold = threshold;
  finish(r);
  return r;
}

std::vector<bool> labels_for(const Recognition& rec, const Narrative& annotation) {
  if (annotation.explicit_horizon() && annotation.horizon() != rec.horizon)
    throw Error("horizon mismatch: annotation covers 0.." + std::to_string(annotation.horizon()) +
                ", results cover 0.." + std::to_string(rec.horizon));
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < rec.atoms.size(); ++i) index.emplace(rec.atoms[i].str(), i);
  for (const auto& f : annotation.annotation()) {
    if (index.count(f.key)) continue;
    if (f.time > rec.horizon)
      throw Error("horizon mismatch: annotation atom " + f.key + " lies beyond the results horizon " +
                  std::to_string(rec.horizon));
    throw Error("annotation atom " + f.key + " has no recognised counterpart");
  }
  std::vector<bool> labels(rec.atoms.size());
  for (std::size_t i = 0; i < rec.atoms.size(); ++i) labels[i] = annotation.annotated(rec.atoms[i].str());
  return labels;
}

MetricsReport metrics(const Recognition& rec, const Narrative& annotation, double threshold) {
  std::vector<bool> labels = labels_for(rec, annotation);
  MetricsReport r;
  r.threshold = threshold;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool p = rec.recognised[i];
    if (p && labels[i])
      ++r.tp;
    else if (p)
      ++r.fp;
    else if (labels[i])
      ++r.fn;
    else
      ++r.tn;
  }
  finish(r);
  if (std::any_of(labels.begin(), labels.end(), [](bool b) { return b; })) r.auprc = auprc(rec.probability, labels);
  return r;
}

double auprc(const std::vector<double>& score, const std::vector<bool>& label) {
  if (score.size() != label.size()) throw Error("auprc: score and label counts differ");
  const std::size_t positives = static_cast<std::size_t>(std::count(label.begin(), label.end(), true));
  if (positives == 0) throw Error("auprc is undefined without positive instances");
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  double area = 0.0, prev_recall = 0.0;
  std::size_t tp = 0, taken = 0;
  for (std::size_t i = 0; i < order.size();) {
    // Everything at or above this score is predicted positive.
    std::size_t j = i;
    while (j < order.size() && score[order[j]] == score[order[i]]) {
      if (label[order[j]]) ++tp;
      ++j;
    }
    taken = j;
    double recall = static_cast<double>(tp) / static_cast<double>(positives);
    double precision = static_cast<double>(tp) / static_cast<double>(taken);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

std::vector<MetricsReport> threshold_sweep(const std::vector<double>& score, const std::vector<bool>& label,
                                           std::size_t points) {
  if (score.size() != label.size()) throw Error("threshold sweep: score and label counts differ");
  if (points < 2) throw Error("threshold sweep needs at least two points");
  std::vector<MetricsReport> out;
  out.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    double th = static_cast<double>(k) / static_cast<double>(points - 1);
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < score.size(); ++i) {
      bool p = score[i] >= th;
      if (p && label[i])
        ++tp;
      else if (p)
        ++fp;
      else if (label[i])
        ++fn;
      else
        ++tn;
    }
    out.push_back(metrics_from_counts(tp, fp, fn, tn, th));
  }
  return out;
}

std::string format_metrics_csv(const std::vector<MetricsReport>& rows, bool header) {
  std::string out;
  if (header) out += "threshold,tp,fp,fn,tn,precision,recall,f1,auprc\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.2f,%zu,%zu,%zu,%zu,%.4f,%.4f,%.4f,", r.threshold, r.tp, r.fp, r.fn, r.tn,
                  r.precision, r.recall, r.f1);
    out += buf;
    if (r.auprc) {
      std::snprintf(buf, sizeof buf, "%.4f", *r.auprc);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace mlnec
