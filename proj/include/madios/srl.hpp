#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "madios/corpus.hpp"
#include "madios/grammar.hpp"

namespace madios {

// <Agent, Patient, Relation>; the eight values are the class labels.
struct RoleTriplet {
    bool agent = false;
    bool patient = false;
    bool relation = false;

    static constexpr std::size_t kClasses = 8;

    // FFF = 0 < FFT = 1 < ... < TTT = 7.
    std::size_t index() const { return (agent ? 4u : 0u) | (patient ? 2u : 0u) | (relation ? 1u : 0u); }
    static RoleTriplet from_index(std::size_t i) { return {(i & 4u) != 0, (i & 2u) != 0, (i & 1u) != 0}; }

    std::string str() const;   // <false,true,false>
    std::string code() const;  // FTF

    friend bool operator==(const RoleTriplet&, const RoleTriplet&) = default;
};

inline constexpr std::string_view kNoWord = "_NONE_";

struct FeatureVector {
    std::string head;
    std::string before2;
    std::string before1;
    std::vector<std::string> inside;
    std::string after1;
    std::string after2;
    std::size_t length = 0;
};

struct Provenance {
    SentenceId sentence_id = 0;
    std::string pattern;
    std::size_t start = 0;
    std::size_t end = 0;
    bool other = false;  // overlaps an Other span
};

struct Instance {
    FeatureVector features;
    RoleTriplet label;
    Provenance provenance;
};

struct ProjectedLabel {
    const ParseTree* node = nullptr;
    RoleTriplet label;
    bool other = false;
};

// One label per pattern node: a role is present when the node's span shares
// at least one token with a span of that role.
std::vector<ProjectedLabel> project_labels(const ParseTree& tree, const RoleAnnotation& annotation);

// Throws ArgumentError unless `node` is a pattern node.
FeatureVector extract_features(const ParseTree& node, std::span<const std::string> tokens);

// Parses every annotated sentence and emits one instance per pattern node.
std::vector<Instance> build_instances(const SentenceParser& parser, const Corpus& corpus,
                                      std::span<const RoleAnnotation> annotations, bool exclude_null_label = false);

// Categorical events per feature position; `inside` yields one event per word.
using EventList = std::vector<std::vector<std::string>>;
EventList feature_events(const FeatureVector& features);

// Naive Bayes over categorical positions with add-`smoothing` estimates:
// P(v | c, p) = (count(v, c, p) + s) / (N(c, p) + s * V(p)), where V(p) is the
// number of distinct training values at position p.
class NBModel {
public:
    static NBModel train(std::span<const EventList> examples, std::span<const std::size_t> labels, double smoothing);

    double prior(std::size_t klass) const;
    double conditional(std::size_t position, std::string_view value, std::size_t klass) const;
    double log_posterior(const EventList& events, std::size_t klass) const;  // unnormalized
    bool observed(std::size_t klass) const { return class_counts_[klass] > 0; }
    std::size_t positions() const { return counts_.size(); }
    std::size_t vocabulary(std::size_t position) const { return vocab_.at(position); }
    double smoothing() const { return smoothing_; }

    // Highest posterior among observed classes; ties go to the lower index.
    std::size_t predict(const EventList& events) const;

    // Multiplies every count, and the smoothing constant, by `factor`.
    NBModel scaled(double factor) const;

private:
    using PerClass = std::array<double, RoleTriplet::kClasses>;
    double smoothing_ = 1.0;
    PerClass class_counts_{};
    double total_ = 0;
    std::vector<std::unordered_map<std::string, PerClass>> counts_;
    std::vector<PerClass> totals_;
    std::vector<std::size_t> vocab_;
};

NBModel train_nb(std::span<const Instance> instances, double smoothing = 1.0);
RoleTriplet classify(const NBModel& model, const FeatureVector& features);

struct ClassMetrics {
    std::size_t support = 0;    // row sum
    std::size_t predicted = 0;  // column sum
    double precision = 0;
    double recall = 0;
    double f_measure = 0;
};

struct EvalReport {
    std::string classifier = "NaiveBayes";
    std::vector<std::string> class_names;
    std::vector<std::vector<std::size_t>> confusion;  // rows actual, columns predicted
    std::vector<ClassMetrics> per_class;
    std::size_t total = 0;
    double accuracy = 0;
    double precision = 0;  // support-weighted
    double recall = 0;
    double f_measure = 0;
    double macro_precision = 0;  // over classes with support
    double macro_recall = 0;
    double macro_f_measure = 0;
    double kappa = 0;
    std::vector<std::string> unstratified_classes;

    std::string table() const;
    std::string key_values() const;
};

// Throws ArgumentError for a non-square or all-zero matrix, or when chance
// agreement is 1 (kappa undefined).
EvalReport evaluate_report(const std::vector<std::vector<std::size_t>>& confusion,
                           std::vector<std::string> class_names = {});

struct FoldAssignment {
    std::vector<std::size_t> fold;  // per instance
    std::vector<std::size_t> unstratified_classes;
};

// Stratified by class from `seed`; classes with fewer than k members are
// pooled and dealt without stratification.
FoldAssignment assign_folds(std::span<const std::size_t> labels, std::size_t k, std::uint64_t seed);

EvalReport cross_validate(std::span<const Instance> instances, std::size_t k, std::uint64_t seed,
                          double smoothing = 1.0);

// head before2 before1 inside(+joined) after1 after2 length label, tab separated.
void write_instances(std::ostream& out, std::span<const Instance> instances);

}  // namespace madios
