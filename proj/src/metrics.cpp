#include "flowids/metrics.hpp"

#include <stdexcept>

namespace flowids {

void ConfusionCounts::add(Vote predicted, Vote truth) {
    if (truth == Vote::positive)
        ++(predicted == Vote::positive ? tp : fn);
    else
        ++(predicted == Vote::positive ? fp : tn);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

ConfusionCounts confusion(std::span<const Vote> predicted, std::span<const Vote> truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("confusion: prediction and truth lengths differ");
    if (predicted.empty()) throw std::invalid_argument("confusion: no instances");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) c.add(predicted[i], truth[i]);
    return c;
}

namespace {
double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

MetricSet compute_metrics(const ConfusionCounts& c) {
    MetricSet m;
    m.accuracy = ratio(c.tp + c.tn, c.total());
    m.far = ratio(c.fp, c.fp + c.tn);
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    const double sum = m.precision + m.recall;
    m.f1 = sum > 0 ? 2.0 * m.precision * m.recall / sum : 0.0;
    return m;
}

}  // namespace flowids
