#include "madios/srl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "madios/error.hpp"

namespace madios {

std::string RoleTriplet::str() const {
    auto b = [](bool v) { return v ? "true" : "false"; };
    return std::string("<") + b(agent) + "," + b(patient) + "," + b(relation) + ">";
}

std::string RoleTriplet::code() const {
    return std::string{agent ? 'T' : 'F', patient ? 'T' : 'F', relation ? 'T' : 'F'};
}

std::vector<ProjectedLabel> project_labels(const ParseTree& tree, const RoleAnnotation& annotation) {
    std::vector<ProjectedLabel> out;
    for (const ParseTree* node : pattern_nodes(tree)) {
        ProjectedLabel label{node, {}, false};
        for (const auto& span : annotation.spans) {
            if (!(node->start < span.end && span.start < node->end)) continue;
            switch (span.role) {
                case Role::Agent: label.label.agent = true; break;
                case Role::Patient: label.label.patient = true; break;
                case Role::Relation: label.label.relation = true; break;
                case Role::Other: label.other = true; break;
            }
        }
        out.push_back(label);
    }
    return out;
}

FeatureVector extract_features(const ParseTree& node, std::span<const std::string> tokens) {
    if (!node.symbol.is_pattern() || node.is_terminal())
        throw ArgumentError("features are only defined for pattern nodes");
    if (node.start >= node.end || node.end > tokens.size()) throw ArgumentError("pattern span outside the sentence");
    auto at = [&](std::ptrdiff_t i) {
        return i >= 0 && static_cast<std::size_t>(i) < tokens.size() ? tokens[static_cast<std::size_t>(i)]
                                                                     : std::string(kNoWord);
    };
    const auto start = static_cast<std::ptrdiff_t>(node.start);
    const auto end = static_cast<std::ptrdiff_t>(node.end);
    FeatureVector fv;
    fv.head = node.label;
    fv.before2 = at(start - 2);
    fv.before1 = at(start - 1);
    fv.inside.assign(tokens.begin() + start, tokens.begin() + end);
    fv.after1 = at(end);
    fv.after2 = at(end + 1);
    fv.length = node.end - node.start;
    return fv;
}

std::vector<Instance> build_instances(const SentenceParser& parser, const Corpus& corpus,
                                      std::span<const RoleAnnotation> annotations, bool exclude_null_label) {
    std::vector<Instance> out;
    for (const auto& annotation : annotations) {
        const Sentence* sentence = corpus.find(annotation.sentence_id);
        if (!sentence) throw ValidationError("annotation for unknown sentence " + std::to_string(annotation.sentence_id));
        const auto tree = parser.parse(sentence->tokens);
        for (const auto& projected : project_labels(tree, annotation)) {
            if (exclude_null_label && projected.label.index() == 0) continue;
            const ParseTree& node = *projected.node;
            out.push_back({extract_features(node, sentence->tokens), projected.label,
                           {sentence->id, node.label, node.start, node.end, projected.other}});
        }
    }
    return out;
}

EventList feature_events(const FeatureVector& f) {
    return {{f.head}, {f.before2}, {f.before1}, f.inside, {f.after1}, {f.after2}, {std::to_string(f.length)}};
}

NBModel NBModel::train(std::span<const EventList> examples, std::span<const std::size_t> labels, double smoothing) {
    if (examples.empty()) throw ArgumentError("cannot train on an empty instance list");
    if (examples.size() != labels.size()) throw ArgumentError("examples and labels differ in length");
    if (!(smoothing > 0)) throw ArgumentError("smoothing must be positive");
    NBModel m;
    m.smoothing_ = smoothing;
    const auto positions = examples.front().size();
    m.counts_.resize(positions);
    m.totals_.assign(positions, PerClass{});
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto c = labels[i];
        if (c >= RoleTriplet::kClasses) throw ArgumentError("class index out of range");
        if (examples[i].size() != positions) throw ArgumentError("inconsistent number of feature positions");
        m.class_counts_[c] += 1;
        m.total_ += 1;
        for (std::size_t p = 0; p < positions; ++p) {
            for (const auto& v : examples[i][p]) {
                m.counts_[p][v][c] += 1;
                m.totals_[p][c] += 1;
            }
        }
    }
    m.vocab_.resize(positions);
    for (std::size_t p = 0; p < positions; ++p) m.vocab_[p] = m.counts_[p].size();
    return m;
}

double NBModel::prior(std::size_t klass) const { return total_ > 0 ? class_counts_.at(klass) / total_ : 0.0; }

double NBModel::conditional(std::size_t position, std::string_view value, std::size_t klass) const {
    const auto& table = counts_.at(position);
    auto it = table.find(std::string(value));
    const double count = it == table.end() ? 0.0 : it->second[klass];
    return (count + smoothing_) / (totals_[position][klass] + smoothing_ * static_cast<double>(vocab_[position]));
}

double NBModel::log_posterior(const EventList& events, std::size_t klass) const {
    if (events.size() != counts_.size()) throw ArgumentError("feature vector has the wrong number of positions");
    double score = std::log(prior(klass));
    for (std::size_t p = 0; p < events.size(); ++p) {
        for (const auto& v : events[p]) score += std::log(conditional(p, v, klass));
    }
    return score;
}

std::size_t NBModel::predict(const EventList& events) const {
    std::size_t best = RoleTriplet::kClasses;
    double best_score = 0;
    for (std::size_t c = 0; c < RoleTriplet::kClasses; ++c) {
        if (!observed(c)) continue;
        const double score = log_posterior(events, c);
        const double tol = 1e-9 * std::max(std::abs(score), std::abs(best_score));
        if (best == RoleTriplet::kClasses || score > best_score + tol) {
            best = c;
            best_score = score;
        }
    }
    return best;
}

NBModel NBModel::scaled(double factor) const {
    if (!(factor > 0)) throw ArgumentError("scale factor must be positive");
    NBModel m = *this;
    m.smoothing_ *= factor;
    m.total_ *= factor;
    for (auto& c : m.class_counts_) c *= factor;
    for (auto& table : m.counts_)
        for (auto& [value, per_class] : table)
            for (auto& c : per_class) c *= factor;
    for (auto& per_class : m.totals_)
        for (auto& c : per_class) c *= factor;
    return m;
}

NBModel train_nb(std::span<const Instance> instances, double smoothing) {
    std::vector<EventList> examples;
    std::vector<std::size_t> labels;
    examples.reserve(instances.size());
    labels.reserve(instances.size());
    for (const auto& inst : instances) {
        examples.push_back(feature_events(inst.features));
        labels.push_back(inst.label.index());
    }
    return NBModel::train(examples, labels, smoothing);
}

RoleTriplet classify(const NBModel& model, const FeatureVector& features) {
    return RoleTriplet::from_index(model.predict(feature_events(features)));
}

EvalReport evaluate_report(const std::vector<std::vector<std::size_t>>& confusion,
                           std::vector<std::string> class_names) {
    const auto n = confusion.size();
    if (n == 0) throw ArgumentError("empty confusion matrix");
    for (const auto& row : confusion) {
        if (row.size() != n) throw ArgumentError("confusion matrix must be square");
    }
    if (class_names.empty()) {
        for (std::size_t i = 0; i < n; ++i) class_names.push_back(std::to_string(i));
    }
    if (class_names.size() != n) throw ArgumentError("one class name per row required");

    EvalReport r;
    r.class_names = std::move(class_names);
    r.confusion = confusion;
    r.per_class.resize(n);
    unsigned __int128 trace = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            r.per_class[i].support += confusion[i][j];
            r.per_class[j].predicted += confusion[i][j];
            r.total += confusion[i][j];
        }
        trace += confusion[i][i];
    }
    if (r.total == 0) throw ArgumentError("confusion matrix has no observations");

    unsigned __int128 chance = 0;
    for (const auto& m : r.per_class) chance += static_cast<unsigned __int128>(m.support) * m.predicted;
    const auto total = static_cast<unsigned __int128>(r.total);
    if (chance == total * total) throw ArgumentError("kappa is undefined when chance agreement is 1");
    r.kappa = (static_cast<double>(total * trace) - static_cast<double>(chance)) /
              (static_cast<double>(total * total) - static_cast<double>(chance));
    r.accuracy = static_cast<double>(trace) / static_cast<double>(r.total);

    std::size_t present = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& m = r.per_class[i];
        const double tp = static_cast<double>(confusion[i][i]);
        m.precision = m.predicted ? tp / static_cast<double>(m.predicted) : 0.0;
        m.recall = m.support ? tp / static_cast<double>(m.support) : 0.0;
        m.f_measure = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        const double w = static_cast<double>(m.support) / static_cast<double>(r.total);
        r.precision += w * m.precision;
        r.recall += w * m.recall;
        r.f_measure += w * m.f_measure;
        if (m.support) {
            ++present;
            r.macro_precision += m.precision;
            r.macro_recall += m.recall;
            r.macro_f_measure += m.f_measure;
        }
    }
    r.macro_precision /= static_cast<double>(present);
    r.macro_recall /= static_cast<double>(present);
    r.macro_f_measure /= static_cast<double>(present);
    return r;
}

namespace {

// Unbiased draw in [0, bound) by rejection, independent of the standard
// library's distribution implementations.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw_below(rng, i)]);
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

FoldAssignment assign_folds(std::span<const std::size_t> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ArgumentError("cross-validation needs at least 2 folds");
    if (labels.size() < k) throw ArgumentError("fewer instances than folds");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> by_class(RoleTriplet::kClasses);
    for (std::size_t i = 0; i < labels.size(); ++i) by_class.at(labels[i]).push_back(i);

    FoldAssignment out;
    out.fold.assign(labels.size(), 0);
    std::size_t next = 0;
    std::vector<std::size_t> pool;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.empty()) continue;
        if (members.size() < k) {
            out.unstratified_classes.push_back(c);
            pool.insert(pool.end(), members.begin(), members.end());
            continue;
        }
        shuffle(members, rng);
        for (auto i : members) out.fold[i] = next++ % k;
    }
    std::sort(pool.begin(), pool.end());
    shuffle(pool, rng);
    for (auto i : pool) out.fold[i] = next++ % k;
    return out;
}

EvalReport cross_validate(std::span<const Instance> instances, std::size_t k, std::uint64_t seed, double smoothing) {
    std::vector<EventList> events;
    std::vector<std::size_t> labels;
    for (const auto& inst : instances) {
        events.push_back(feature_events(inst.features));
        labels.push_back(inst.label.index());
    }
    const auto folds = assign_folds(labels, k, seed);

    std::vector<std::vector<std::size_t>> confusion(RoleTriplet::kClasses,
                                                    std::vector<std::size_t>(RoleTriplet::kClasses, 0));
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<EventList> train_x;
        std::vector<std::size_t> train_y;
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (folds.fold[i] == f) continue;
            train_x.push_back(events[i]);
            train_y.push_back(labels[i]);
        }
        const auto model = NBModel::train(train_x, train_y, smoothing);
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (folds.fold[i] == f) ++confusion[labels[i]][model.predict(events[i])];
        }
    }

    std::vector<std::string> names;
    for (std::size_t c = 0; c < RoleTriplet::kClasses; ++c) names.push_back(RoleTriplet::from_index(c).code());
    auto report = evaluate_report(confusion, names);
    for (auto c : folds.unstratified_classes) report.unstratified_classes.push_back(names[c]);
    return report;
}

std::string EvalReport::table() const {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %7s %7s %7s %7s\n", "Classifier", "P", "R", "F", "K");
    out << line;
    std::snprintf(line, sizeof line, "%-12s %7.3f %7.3f %7.3f %7.3f\n", classifier.c_str(), precision, recall,
                  f_measure, kappa);
    out << line;
    std::snprintf(line, sizeof line, "%-12s %7.3f %7.3f %7.3f %7s\n", "(macro)", macro_precision, macro_recall,
                  macro_f_measure, "");
    out << line << '\n';
    std::snprintf(line, sizeof line, "%-12s %7s %7s %7s %7s %9s\n", "Class", "Support", "P", "R", "F", "Predicted");
    out << line;
    for (std::size_t i = 0; i < per_class.size(); ++i) {
        const auto& m = per_class[i];
        std::snprintf(line, sizeof line, "%-12s %7zu %7.3f %7.3f %7.3f %9zu\n", class_names[i].c_str(), m.support,
                      m.precision, m.recall, m.f_measure, m.predicted);
        out << line;
    }
    out << "\ninstances: " << total << "  accuracy: " << fmt(accuracy, 3) << '\n';
    if (!unstratified_classes.empty()) {
        out << "unstratified classes:";
        for (const auto& c : unstratified_classes) out << ' ' << c;
        out << '\n';
    }
    return out.str();
}

std::string EvalReport::key_values() const {
    std::ostringstream out;
    out << "classifier=" << classifier << '\n'
        << "instances=" << total << '\n'
        << "precision=" << fmt(precision, 6) << '\n'
        << "recall=" << fmt(recall, 6) << '\n'
        << "f_measure=" << fmt(f_measure, 6) << '\n'
        << "kappa=" << fmt(kappa, 6) << '\n'
        << "accuracy=" << fmt(accuracy, 6) << '\n'
        << "macro_precision=" << fmt(macro_precision, 6) << '\n'
        << "macro_recall=" << fmt(macro_recall, 6) << '\n'
        << "macro_f_measure=" << fmt(macro_f_measure, 6) << '\n';
    for (std::size_t i = 0; i < per_class.size(); ++i) {
        const auto& m = per_class[i];
        const auto& name = class_names[i];
        out << "class." << name << ".support=" << m.support << '\n'
            << "class." << name << ".precision=" << fmt(m.precision, 6) << '\n'
            << "class." << name << ".recall=" << fmt(m.recall, 6) << '\n'
            << "class." << name << ".f_measure=" << fmt(m.f_measure, 6) << '\n';
        out << "confusion." << name << '=';
        for (std::size_t j = 0; j < confusion[i].size(); ++j) out << (j ? " " : "") << confusion[i][j];
        out << '\n';
    }
    out << "unstratified_classes=";
    for (std::size_t i = 0; i < unstratified_classes.size(); ++i) out << (i ? "," : "") << unstratified_classes[i];
    out << '\n';
    return out.str();
}

void write_instances(std::ostream& out, std::span<const Instance> instances) {
    for (const auto& inst : instances) {
        const auto& f = inst.features;
        std::string inside;
        for (std::size_t i = 0; i < f.inside.size(); ++i) inside += (i ? "+" : "") + f.inside[i];
        out << f.head << '\t' << f.before2 << '\t' << f.before1 << '\t' << inside << '\t' << f.after1 << '\t'
            << f.after2 << '\t' << f.length << '\t' << inst.label.str() << '\n';
    }
}

}  // namespace madios
