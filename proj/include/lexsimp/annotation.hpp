#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexsimp/corpus.hpp"
#include "lexsimp/ensemble.hpp"
#include "lexsimp/promptkit.hpp"
#include "lexsimp/providers.hpp"

// Dataset construction: pseudo-substitute pools, LLM pre-annotation, human
// judgments and export of the adjudicated dataset.
namespace lexsimp::annotation {

using text::Span;

inline constexpr std::size_t kPoolSize = 12;

enum class Signal { yes, no, failed };
enum class Verdict { YES, NO, UNSURE };

std::string_view to_string(Signal s);
Signal parse_signal(std::string_view s);    // throws ParseError
std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view s);  // throws ParseError

/// Four advisory signals for one substitute: model A/B x direct/chain-of-thought.
struct SignalSet {
    Signal a_direct = Signal::failed;
    Signal a_cot = Signal::failed;
    Signal b_direct = Signal::failed;
    Signal b_cot = Signal::failed;

    std::array<Signal, 4> all() const { return {a_direct, a_cot, b_direct, b_cot}; }
    friend bool operator==(const SignalSet&, const SignalSet&) = default;
};

struct AnnotationTask {
    std::string task_id;
    std::string instance_id;
    corpus::Genre genre = corpus::Genre::other;
    std::string sentence;
    std::string surface;
    Span span;
    int weight = 1;
    std::vector<std::string> pseudo_substitutes;
    /// Parallel to pseudo_substitutes once pre-annotated, else empty.
    std::vector<SignalSet> recommendations;
    std::optional<std::string> adjudicator;

    friend bool operator==(const AnnotationTask&, const AnnotationTask&) = default;
};

struct Judgment {
    std::string task_id;
    std::string substitute;
    std::string annotator_id;
    Verdict verdict = Verdict::UNSURE;
    std::int64_t timestamp = 0;  // milliseconds since the epoch
    std::uint64_t seq = 0;       // store order; decides "latest"

    friend bool operator==(const Judgment&, const Judgment&) = default;
};

struct AddedSubstitute {
    std::string task_id;
    std::string text;
    std::string annotator_id;
    std::int64_t timestamp = 0;
    std::uint64_t seq = 0;

    friend bool operator==(const AddedSubstitute&, const AddedSubstitute&) = default;
};

/// Three ordered generator lists for one target occurrence.
struct GeneratorOutputs {
    std::string instance_id;
    Span span;
    std::vector<ensemble::CandidateList> lists;
};

/// One task per complex word; instances may lack gold substitutes.
/// Throws InputError when a target has no entry or not exactly 3 lists.
std::vector<AnnotationTask> build_tasks(std::span<const corpus::Instance> instances,
                                        std::span<const GeneratorOutputs> outputs);

std::string make_task_id(std::string_view instance_id, Span span);

struct PreannotateOptions {
    std::size_t shots = 2;
    providers::Decoding decoding = providers::judgement_decoding();
};

/// Fills `recommendations` with 4 calls per substitute. Provider failures and
/// unparseable answers become `failed`; never throws on model output.
void preannotate(std::vector<AnnotationTask>& tasks, providers::Provider& model_a, providers::Provider& model_b,
                 const promptkit::PromptBank& bank, const PreannotateOptions& options = {});

enum class Adjudication { designated, majority };

struct ExportOptions {
    Adjudication policy = Adjudication::designated;
    /// Used for tasks without their own adjudicator; when neither is set the
    /// latest verdict from any annotator decides.
    std::optional<std::string> adjudicator;
    bool force = false;
};

/// The deciding verdict for one substitute, if any.
std::optional<Verdict> adjudicate(const AnnotationTask& task, std::string_view substitute,
                                  std::span<const Judgment> judgments, const ExportOptions& options);

/// Accepted substitutes (pseudo first, then added) per target; targets without
/// any are dropped. Throws IncompleteError when a substitute lacks a deciding
/// verdict and `force` is off.
std::vector<corpus::Instance> export_dataset(std::span<const AnnotationTask> tasks,
                                             std::span<const Judgment> judgments,
                                             std::span<const AddedSubstitute> added, const ExportOptions& options = {});

struct ConsistencyReport {
    int k = 3;
    std::size_t adopted = 0;
    std::size_t agree = 0;
    double ratio = 0.0;
};

/// Compares LLM consensus (at least k of 4 signals equal) with the deciding
/// human verdict. UNSURE and missing verdicts are excluded. k must be 3 or 4.
ConsistencyReport consistency_report(std::span<const AnnotationTask> tasks, std::span<const Judgment> judgments,
                                     int k, const ExportOptions& options = {});

/// correct / total for manual audits; 0 when total is 0.
double audit_ratio(std::size_t correct, std::size_t total);

struct Progress {
    std::size_t done = 0;
    std::size_t total = 0;
};

struct TaskSummary {
    std::string task_id;
    std::string instance_id;
    std::string surface;
    Progress progress;
};

/// Full task payload: the task, its added substitutes and the current
/// verdicts of one annotator (or the latest of anyone).
struct TaskView {
    AnnotationTask task;
    std::vector<AddedSubstitute> added;
    std::vector<std::pair<std::string, Verdict>> verdicts;
    Progress progress;
};

struct StoreOptions {
    /// Empty: memory only. Otherwise holds snapshot.json and journal.jsonl.
    std::filesystem::path directory;
    /// Journal entries between automatic snapshots; 0 disables.
    std::size_t snapshot_every = 256;
    std::function<std::int64_t()> clock;
};

/// Append-only state with a single writer. Readers take a shared lock.
class AnnotationStore {
public:
    explicit AnnotationStore(StoreOptions options = {});

    /// Adds or replaces tasks by id.
    void import_tasks(std::span<const AnnotationTask> tasks);

    std::vector<TaskSummary> list_tasks(const std::optional<std::string>& annotator = std::nullopt) const;
    TaskView get_task(const std::string& task_id, const std::optional<std::string>& annotator = std::nullopt) const;

    /// Throws NotFound for an unknown task and ValidationError for an
    /// unknown substitute or blank annotator.
    Judgment record_judgment(const std::string& task_id, const std::string& substitute,
                             const std::string& annotator_id, Verdict verdict);
    AddedSubstitute add_substitute(const std::string& task_id, const std::string& text,
                                   const std::string& annotator_id);

    std::vector<AnnotationTask> tasks() const;
    std::vector<Judgment> judgments() const;
    std::vector<AddedSubstitute> added() const;

    std::vector<corpus::Instance> export_dataset(const ExportOptions& options = {}) const;
    ConsistencyReport consistency_report(int k, const ExportOptions& options = {}) const;

    /// Writes the snapshot and truncates the journal.
    void snapshot();

private:
    const AnnotationTask& find_task(const std::string& task_id) const;
    void apply(const nlohmann::ordered_json& event);
    void append(const nlohmann::ordered_json& event);
    void write_snapshot_locked();
    Progress progress_locked(const AnnotationTask& task, const std::optional<std::string>& annotator) const;

    StoreOptions options_;
    mutable std::shared_mutex mutex_;
    std::vector<AnnotationTask> tasks_;
    std::vector<Judgment> judgments_;
    std::vector<AddedSubstitute> added_;
    std::uint64_t next_seq_ = 1;
    std::size_t journal_entries_ = 0;
    std::ofstream journal_;
};

void to_json(nlohmann::ordered_json& j, const SignalSet& s);
void from_json(const nlohmann::ordered_json& j, SignalSet& s);
void to_json(nlohmann::ordered_json& j, const AnnotationTask& t);
void from_json(const nlohmann::ordered_json& j, AnnotationTask& t);
void to_json(nlohmann::ordered_json& j, const Judgment& v);
void from_json(const nlohmann::ordered_json& j, Judgment& v);
void to_json(nlohmann::ordered_json& j, const AddedSubstitute& a);
void from_json(const nlohmann::ordered_json& j, AddedSubstitute& a);
void to_json(nlohmann::ordered_json& j, const ConsistencyReport& r);
void to_json(nlohmann::ordered_json& j, const TaskSummary& s);
void to_json(nlohmann::ordered_json& j, const TaskView& v);
void from_json(const nlohmann::ordered_json& j, GeneratorOutputs& g);

std::vector<AnnotationTask> load_tasks(std::istream& in);  // JSON lines
void save_tasks(std::span<const AnnotationTask> tasks, std::ostream& out);

} // namespace lexsimp::annotation
