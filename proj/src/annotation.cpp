#include "lexsimp/annotation.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "lexsimp/errors.hpp"

namespace lexsimp::annotation {

using Json = nlohmann::ordered_json;

namespace {

std::int64_t system_millis() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Json span_json(Span s) { return Json::array({s.start, s.end}); }

Span span_from(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("span must be a [start, end] pair");
    return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

/// Latest judgment per annotator for one substitute, in seq order.
std::vector<const Judgment*> latest_per_annotator(const AnnotationTask& task, std::string_view substitute,
                                                   std::span<const Judgment> judgments) {
    std::map<std::string, const Judgment*> latest;
    for (const auto& j : judgments) {
        if (j.task_id != task.task_id || !text::equals_ci(j.substitute, substitute)) continue;
        auto& slot = latest[j.annotator_id];
        if (slot == nullptr || j.seq > slot->seq) slot = &j;
    }
    std::vector<const Judgment*> out;
    for (const auto& [_, j] : latest) out.push_back(j);
    std::sort(out.begin(), out.end(), [](const Judgment* a, const Judgment* b) { return a->seq < b->seq; });
    return out;
}

std::vector<std::string> added_for(const AnnotationTask& task, std::span<const AddedSubstitute> added) {
    std::vector<const AddedSubstitute*> mine;
    for (const auto& a : added) {
        if (a.task_id == task.task_id) mine.push_back(&a);
    }
    std::sort(mine.begin(), mine.end(),
              [](const AddedSubstitute* a, const AddedSubstitute* b) { return a->seq < b->seq; });
    std::vector<std::string> out;
    for (const auto* a : mine) out.push_back(a->text);
    return out;
}

std::optional<std::string> find_ci(std::span<const std::string> items, std::string_view needle) {
    for (const auto& s : items) {
        if (text::equals_ci(s, needle)) return s;
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(Signal s) {
    switch (s) {
    case Signal::yes: return "yes";
    case Signal::no: return "no";
    case Signal::failed: return "failed";
    }
    return "?";
}

Signal parse_signal(std::string_view s) {
    if (s == "yes") return Signal::yes;
    if (s == "no") return Signal::no;
    if (s == "failed") return Signal::failed;
    throw ParseError("unknown signal '" + std::string(s) + "'");
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::YES: return "YES";
    case Verdict::NO: return "NO";
    case Verdict::UNSURE: return "UNSURE";
    }
    return "?";
}

Verdict parse_verdict(std::string_view s) {
    if (s == "YES") return Verdict::YES;
    if (s == "NO") return Verdict::NO;
    if (s == "UNSURE") return Verdict::UNSURE;
    throw ParseError("unknown verdict '" + std::string(s) + "' (expected YES, NO or UNSURE)");
}

std::string make_task_id(std::string_view instance_id, Span span) {
    return std::string(instance_id) + ":" + std::to_string(span.start) + "-" + std::to_string(span.end);
}

// --- offline batch steps -----------------------------------------------------

std::vector<AnnotationTask> build_tasks(std::span<const corpus::Instance> instances,
                                        std::span<const GeneratorOutputs> outputs) {
    std::map<std::tuple<std::string, std::size_t, std::size_t>, const GeneratorOutputs*> by_target;
    for (const auto& o : outputs) {
        by_target[{o.instance_id, o.span.start, o.span.end}] = &o;
    }
    std::vector<AnnotationTask> tasks;
    std::size_t used = 0;
    for (const auto& inst : instances) {
        for (const auto& word : inst.complex_words) {
            const auto it = by_target.find({inst.id, word.span.start, word.span.end});
            const auto task_id = make_task_id(inst.id, word.span);
            if (it == by_target.end()) throw InputError("no generator lists for target " + task_id);
            const auto& lists = it->second->lists;
            if (lists.size() != 3) {
                throw InputError("target " + task_id + " needs 3 generator lists, got " +
                                 std::to_string(lists.size()));
            }
            ++used;
            // The target itself is never a valid substitute.
            std::vector<ensemble::CandidateList> filtered;
            for (const auto& list : lists) {
                ensemble::CandidateList keep;
                for (const auto& cand : list) {
                    if (!text::equals_ci(text::trim(cand), word.surface)) keep.push_back(cand);
                }
                filtered.push_back(std::move(keep));
            }
            AnnotationTask task;
            task.task_id = task_id;
            task.instance_id = inst.id;
            task.genre = inst.genre;
            task.sentence = inst.sentence;
            task.surface = word.surface;
            task.span = word.span;
            task.weight = word.weight;
            for (auto& c : ensemble::combine_score(filtered, kPoolSize)) task.pseudo_substitutes.push_back(c.text);
            tasks.push_back(std::move(task));
        }
    }
    if (used != by_target.size()) throw InputError("generator lists reference targets absent from the dataset");
    return tasks;
}

void preannotate(std::vector<AnnotationTask>& tasks, providers::Provider& model_a, providers::Provider& model_b,
                 const promptkit::PromptBank& bank, const PreannotateOptions& options) {
    using promptkit::PromptRole;
    auto signals = [&](providers::Provider& model, PromptRole role, const AnnotationTask& task) {
        const auto k = std::min(options.shots, bank.demo_count(role));
        std::vector<providers::ChatRequest> requests;
        for (const auto& sub : task.pseudo_substitutes) {
            requests.push_back({promptkit::render(bank, role, {{"sentence", task.sentence}, {"alternative", sub}}, k,
                                                  0, task.span),
                                options.decoding});
        }
        std::vector<Signal> out;
        for (const auto& r : model.complete_many(requests)) {
            const auto* resp = std::get_if<providers::ChatResponse>(&r);
            if (resp == nullptr) {
                out.push_back(Signal::failed);
                continue;
            }
            try {
                out.push_back(promptkit::parse_yes_no(resp->text) ? Signal::yes : Signal::no);
            } catch (const ParseError&) {
                out.push_back(Signal::failed);
            }
        }
        return out;
    };
    for (auto& task : tasks) {
        const auto ad = signals(model_a, PromptRole::AnnotateDirect, task);
        const auto ac = signals(model_a, PromptRole::AnnotateCot, task);
        const auto bd = signals(model_b, PromptRole::AnnotateDirect, task);
        const auto bc = signals(model_b, PromptRole::AnnotateCot, task);
        task.recommendations.clear();
        for (std::size_t i = 0; i < task.pseudo_substitutes.size(); ++i) {
            task.recommendations.push_back({ad[i], ac[i], bd[i], bc[i]});
        }
    }
}

// --- adjudication, export, consistency ---------------------------------------

std::optional<Verdict> adjudicate(const AnnotationTask& task, std::string_view substitute,
                                  std::span<const Judgment> judgments, const ExportOptions& options) {
    const auto latest = latest_per_annotator(task, substitute, judgments);
    if (latest.empty()) return std::nullopt;
    if (options.policy == Adjudication::majority) {
        std::size_t yes = 0;
        std::size_t unsure = 0;
        for (const auto* j : latest) {
            yes += j->verdict == Verdict::YES;
            unsure += j->verdict == Verdict::UNSURE;
        }
        if (2 * yes > latest.size()) return Verdict::YES;
        if (2 * unsure > latest.size()) return Verdict::UNSURE;
        return Verdict::NO;
    }
    const auto who = task.adjudicator ? task.adjudicator : options.adjudicator;
    if (!who) return latest.back()->verdict;
    for (const auto* j : latest) {
        if (j->annotator_id == *who) return j->verdict;
    }
    return std::nullopt;
}

std::vector<corpus::Instance> export_dataset(std::span<const AnnotationTask> tasks,
                                             std::span<const Judgment> judgments,
                                             std::span<const AddedSubstitute> added, const ExportOptions& options) {
    std::vector<corpus::Instance> out;
    std::map<std::string, std::size_t> slot;
    std::size_t missing = 0;
    std::string first_missing;

    for (const auto& task : tasks) {
        auto [it, inserted] = slot.try_emplace(task.instance_id, out.size());
        if (inserted) out.push_back({task.instance_id, task.genre, task.sentence, {}});
        auto& inst = out[it->second];
        if (inst.sentence != task.sentence) {
            throw ValidationError(task.task_id, "sentence", "differs from other tasks of instance " + task.instance_id);
        }

        std::vector<std::string> candidates = task.pseudo_substitutes;
        for (auto& a : added_for(task, added)) candidates.push_back(std::move(a));
        corpus::GoldComplexWord word{task.surface, task.span, task.weight, {}};
        for (const auto& cand : candidates) {
            const auto verdict = adjudicate(task, cand, judgments, options);
            if (!verdict) {
                if (missing++ == 0) first_missing = task.task_id + " / " + cand;
                continue;
            }
            if (*verdict == Verdict::YES) word.substitutes.push_back(cand);
        }
        if (!word.substitutes.empty()) inst.complex_words.push_back(std::move(word));
    }
    if (missing > 0 && !options.force) {
        throw IncompleteError(std::to_string(missing) + " substitute(s) lack a deciding verdict (first: " +
                              first_missing + ")");
    }
    for (auto& inst : out) {
        std::sort(inst.complex_words.begin(), inst.complex_words.end(),
                  [](const auto& a, const auto& b) { return a.span.start < b.span.start; });
        corpus::validate(inst);
    }
    return out;
}

ConsistencyReport consistency_report(std::span<const AnnotationTask> tasks, std::span<const Judgment> judgments,
                                     int k, const ExportOptions& options) {
    if (k != 3 && k != 4) throw InputError("consistency threshold k must be 3 or 4");
    ConsistencyReport r;
    r.k = k;
    for (const auto& task : tasks) {
        const auto n = std::min(task.pseudo_substitutes.size(), task.recommendations.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto all = task.recommendations[i].all();
            const auto yes = std::count(all.begin(), all.end(), Signal::yes);
            const auto no = std::count(all.begin(), all.end(), Signal::no);
            std::optional<Signal> consensus;
            if (yes >= k) consensus = Signal::yes;
            if (no >= k) consensus = Signal::no;
            if (!consensus) continue;
            const auto human = adjudicate(task, task.pseudo_substitutes[i], judgments, options);
            if (!human || *human == Verdict::UNSURE) continue;
            ++r.adopted;
            if ((*human == Verdict::YES) == (*consensus == Signal::yes)) ++r.agree;
        }
    }
    r.ratio = r.adopted == 0 ? 0.0 : static_cast<double>(r.agree) / static_cast<double>(r.adopted);
    return r;
}

double audit_ratio(std::size_t correct, std::size_t total) {
    if (correct > total) throw InputError("audit: correct exceeds total");
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

// --- store ---------------------------------------------------------------------

AnnotationStore::AnnotationStore(StoreOptions options) : options_(std::move(options)) {
    if (!options_.clock) options_.clock = system_millis;
    if (options_.directory.empty()) return;

    std::error_code ec;
    std::filesystem::create_directories(options_.directory, ec);
    if (ec) throw IoError("cannot create store directory " + options_.directory.string() + ": " + ec.message());

    const auto snap_path = options_.directory / "snapshot.json";
    if (std::filesystem::exists(snap_path)) {
        std::ifstream in(snap_path);
        Json snap;
        try {
            snap = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("snapshot " + snap_path.string() + ": " + e.what());
        }
        tasks_ = snap.value("tasks", std::vector<AnnotationTask>{});
        judgments_ = snap.value("judgments", std::vector<Judgment>{});
        added_ = snap.value("added", std::vector<AddedSubstitute>{});
        next_seq_ = snap.value("next_seq", std::uint64_t{1});
    }

    const auto journal_path = options_.directory / "journal.jsonl";
    if (std::filesystem::exists(journal_path)) {
        std::ifstream in(journal_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (text::trim(line).empty()) continue;
            Json event;
            try {
                event = Json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                // A torn final write is tolerated; anything earlier is corruption.
                if (in.peek() == std::char_traits<char>::eof()) break;
                throw ParseError(std::string("journal: ") + e.what(), line_no);
            }
            // Entries already folded into the snapshot are skipped.
            if (event.value("seq", std::uint64_t{0}) < next_seq_) continue;
            apply(event);
            ++journal_entries_;
        }
    }
    journal_.open(journal_path, std::ios::app);
    if (!journal_) throw IoError("cannot open journal " + journal_path.string());
}

void AnnotationStore::apply(const Json& event) {
    const auto type = event.at("type").get<std::string>();
    const auto seq = event.at("seq").get<std::uint64_t>();
    if (type == "tasks") {
        for (const auto& t : event.at("tasks").get<std::vector<AnnotationTask>>()) {
            auto it = std::find_if(tasks_.begin(), tasks_.end(), [&](const auto& x) { return x.task_id == t.task_id; });
            if (it == tasks_.end()) {
                tasks_.push_back(t);
            } else {
                *it = t;
            }
        }
    } else if (type == "judgment") {
        judgments_.push_back(event.at("judgment").get<Judgment>());
    } else if (type == "substitute") {
        added_.push_back(event.at("substitute").get<AddedSubstitute>());
    } else {
        throw ParseError("unknown journal event '" + type + "'");
    }
    next_seq_ = std::max(next_seq_, seq + 1);
}

void AnnotationStore::append(const Json& event) {
    apply(event);
    if (options_.directory.empty()) return;
    journal_ << event.dump() << '\n';
    journal_.flush();
    if (!journal_) throw IoError("journal write failed");
    if (options_.snapshot_every > 0 && ++journal_entries_ >= options_.snapshot_every) write_snapshot_locked();
}

void AnnotationStore::write_snapshot_locked() {
    if (options_.directory.empty()) return;
    Json snap = Json::object();
    snap["next_seq"] = next_seq_;
    snap["tasks"] = tasks_;
    snap["judgments"] = judgments_;
    snap["added"] = added_;
    const auto path = options_.directory / "snapshot.json";
    const auto tmp = options_.directory / "snapshot.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << snap.dump() << '\n';
        if (!out) throw IoError("cannot write snapshot " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot install snapshot: " + ec.message());
    journal_.close();
    journal_.open(options_.directory / "journal.jsonl", std::ios::trunc);
    journal_entries_ = 0;
}

void AnnotationStore::snapshot() {
    std::unique_lock lock(mutex_);
    write_snapshot_locked();
}

void AnnotationStore::import_tasks(std::span<const AnnotationTask> tasks) {
    for (const auto& t : tasks) {
        if (t.task_id.empty()) throw ValidationError("task", "task_id", "must not be empty");
        if (t.pseudo_substitutes.size() > kPoolSize) {
            throw ValidationError(t.task_id, "pseudo_substitutes", "more than 12 entries");
        }
        for (std::size_t i = 0; i < t.pseudo_substitutes.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (text::equals_ci(t.pseudo_substitutes[i], t.pseudo_substitutes[j])) {
                    throw ValidationError(t.task_id, "pseudo_substitutes", "duplicate '" + t.pseudo_substitutes[i] + "'");
                }
            }
        }
        if (!t.recommendations.empty() && t.recommendations.size() != t.pseudo_substitutes.size()) {
            throw ValidationError(t.task_id, "recommendations", "must parallel pseudo_substitutes");
        }
    }
    std::unique_lock lock(mutex_);
    Json event = Json::object();
    event["type"] = "tasks";
    event["seq"] = next_seq_;
    event["tasks"] = std::vector<AnnotationTask>(tasks.begin(), tasks.end());
    append(event);
}

const AnnotationTask& AnnotationStore::find_task(const std::string& task_id) const {
    for (const auto& t : tasks_) {
        if (t.task_id == task_id) return t;
    }
    throw NotFound("unknown task '" + task_id + "'");
}

Progress AnnotationStore::progress_locked(const AnnotationTask& task,
                                          const std::optional<std::string>& annotator) const {
    auto subs = task.pseudo_substitutes;
    for (auto& a : added_for(task, added_)) subs.push_back(std::move(a));
    Progress p{0, subs.size()};
    for (const auto& s : subs) {
        const bool answered = std::any_of(judgments_.begin(), judgments_.end(), [&](const Judgment& j) {
            return j.task_id == task.task_id && text::equals_ci(j.substitute, s) &&
                   (!annotator || j.annotator_id == *annotator);
        });
        p.done += answered;
    }
    return p;
}

std::vector<TaskSummary> AnnotationStore::list_tasks(const std::optional<std::string>& annotator) const {
    std::shared_lock lock(mutex_);
    std::vector<TaskSummary> out;
    for (const auto& t : tasks_) {
        out.push_back({t.task_id, t.instance_id, t.surface, progress_locked(t, annotator)});
    }
    return out;
}

TaskView AnnotationStore::get_task(const std::string& task_id, const std::optional<std::string>& annotator) const {
    std::shared_lock lock(mutex_);
    TaskView view;
    view.task = find_task(task_id);
    for (const auto& a : added_) {
        if (a.task_id == task_id) view.added.push_back(a);
    }
    auto subs = view.task.pseudo_substitutes;
    for (const auto& a : view.added) subs.push_back(a.text);
    for (const auto& s : subs) {
        const Judgment* latest = nullptr;
        for (const auto& j : judgments_) {
            if (j.task_id != task_id || !text::equals_ci(j.substitute, s)) continue;
            if (annotator && j.annotator_id != *annotator) continue;
            if (latest == nullptr || j.seq > latest->seq) latest = &j;
        }
        if (latest != nullptr) view.verdicts.emplace_back(s, latest->verdict);
    }
    view.progress = progress_locked(view.task, annotator);
    return view;
}

Judgment AnnotationStore::record_judgment(const std::string& task_id, const std::string& substitute,
                                          const std::string& annotator_id, Verdict verdict) {
    std::unique_lock lock(mutex_);
    const auto& task = find_task(task_id);
    if (text::trim(annotator_id).empty()) throw ValidationError(task_id, "annotator_id", "must not be empty");
    auto canonical = find_ci(task.pseudo_substitutes, substitute);
    if (!canonical) {
        const auto extra = added_for(task, added_);
        canonical = find_ci(extra, substitute);
    }
    if (!canonical) throw ValidationError(task_id, "substitute", "'" + substitute + "' is not offered by this task");

    Judgment j{task_id, *canonical, annotator_id, verdict, options_.clock(), next_seq_};
    Json event = Json::object();
    event["type"] = "judgment";
    event["seq"] = j.seq;
    event["judgment"] = j;
    append(event);
    return j;
}

AddedSubstitute AnnotationStore::add_substitute(const std::string& task_id, const std::string& text_in,
                                                const std::string& annotator_id) {
    std::unique_lock lock(mutex_);
    const auto& task = find_task(task_id);
    if (text::trim(annotator_id).empty()) throw ValidationError(task_id, "annotator_id", "must not be empty");
    const auto value = text::trim(text_in);
    if (value.empty() || value.find('\n') != std::string::npos) {
        throw ValidationError(task_id, "text", "substitute must be a non-empty single line");
    }
    if (text::equals_ci(value, task.surface)) throw ValidationError(task_id, "text", "equals the target word");
    if (find_ci(task.pseudo_substitutes, value) || find_ci(added_for(task, added_), value)) {
        throw ValidationError(task_id, "text", "'" + value + "' is already listed");
    }
    AddedSubstitute a{task_id, value, annotator_id, options_.clock(), next_seq_};
    Json event = Json::object();
    event["type"] = "substitute";
    event["seq"] = a.seq;
    event["substitute"] = a;
    append(event);
    return a;
}

std::vector<AnnotationTask> AnnotationStore::tasks() const {
    std::shared_lock lock(mutex_);
    return tasks_;
}

std::vector<Judgment> AnnotationStore::judgments() const {
    std::shared_lock lock(mutex_);
    return judgments_;
}

std::vector<AddedSubstitute> AnnotationStore::added() const {
    std::shared_lock lock(mutex_);
    return added_;
}

std::vector<corpus::Instance> AnnotationStore::export_dataset(const ExportOptions& options) const {
    std::shared_lock lock(mutex_);
    return annotation::export_dataset(tasks_, judgments_, added_, options);
}

ConsistencyReport AnnotationStore::consistency_report(int k, const ExportOptions& options) const {
    std::shared_lock lock(mutex_);
    return annotation::consistency_report(tasks_, judgments_, k, options);
}

// --- JSON ------------------------------------------------------------------------

void to_json(Json& j, const SignalSet& s) {
    j = Json{{"A", {{"direct", to_string(s.a_direct)}, {"cot", to_string(s.a_cot)}}},
             {"B", {{"direct", to_string(s.b_direct)}, {"cot", to_string(s.b_cot)}}}};
}

void from_json(const Json& j, SignalSet& s) {
    auto get = [&](const char* model, const char* style) {
        return parse_signal(j.at(model).at(style).get<std::string>());
    };
    s = {get("A", "direct"), get("A", "cot"), get("B", "direct"), get("B", "cot")};
}

void to_json(Json& j, const AnnotationTask& t) {
    j = Json::object();
    j["task_id"] = t.task_id;
    j["instance_id"] = t.instance_id;
    j["genre"] = corpus::to_string(t.genre);
    j["sentence"] = t.sentence;
    j["target"] = {{"surface", t.surface}, {"span", span_json(t.span)}, {"weight", t.weight}};
    j["pseudo_substitutes"] = t.pseudo_substitutes;
    Json recs = Json::array();
    for (std::size_t i = 0; i < t.recommendations.size() && i < t.pseudo_substitutes.size(); ++i) {
        Json r = Json::object();
        r["substitute"] = t.pseudo_substitutes[i];
        const Json signals = t.recommendations[i];
        for (const auto& [k, v] : signals.items()) r[k] = v;
        recs.push_back(std::move(r));
    }
    j["recommendations"] = std::move(recs);
    if (t.adjudicator) j["adjudicator"] = *t.adjudicator;
}

void from_json(const Json& j, AnnotationTask& t) {
    t.task_id = j.at("task_id").get<std::string>();
    t.instance_id = j.at("instance_id").get<std::string>();
    t.genre = corpus::parse_genre(j.value("genre", std::string("other")));
    t.sentence = j.at("sentence").get<std::string>();
    const auto& target = j.at("target");
    t.surface = target.at("surface").get<std::string>();
    t.span = span_from(target.at("span"));
    t.weight = target.value("weight", 1);
    t.pseudo_substitutes = j.at("pseudo_substitutes").get<std::vector<std::string>>();
    t.recommendations.clear();
    for (const auto& r : j.value("recommendations", Json::array())) t.recommendations.push_back(r.get<SignalSet>());
    t.adjudicator = j.contains("adjudicator") ? std::optional(j.at("adjudicator").get<std::string>()) : std::nullopt;
}

void to_json(Json& j, const Judgment& v) {
    j = Json{{"task_id", v.task_id},   {"substitute", v.substitute}, {"annotator_id", v.annotator_id},
             {"verdict", to_string(v.verdict)}, {"timestamp", v.timestamp}, {"seq", v.seq}};
}

void from_json(const Json& j, Judgment& v) {
    v.task_id = j.at("task_id").get<std::string>();
    v.substitute = j.at("substitute").get<std::string>();
    v.annotator_id = j.at("annotator_id").get<std::string>();
    v.verdict = parse_verdict(j.at("verdict").get<std::string>());
    v.timestamp = j.value("timestamp", std::int64_t{0});
    v.seq = j.value("seq", std::uint64_t{0});
}

void to_json(Json& j, const AddedSubstitute& a) {
    j = Json{{"task_id", a.task_id},
             {"text", a.text},
             {"annotator_id", a.annotator_id},
             {"timestamp", a.timestamp},
             {"seq", a.seq}};
}

void from_json(const Json& j, AddedSubstitute& a) {
    a.task_id = j.at("task_id").get<std::string>();
    a.text = j.at("text").get<std::string>();
    a.annotator_id = j.at("annotator_id").get<std::string>();
    a.timestamp = j.value("timestamp", std::int64_t{0});
    a.seq = j.value("seq", std::uint64_t{0});
}

void to_json(Json& j, const ConsistencyReport& r) {
    j = Json{{"k", r.k}, {"adopted", r.adopted}, {"agree", r.agree}, {"ratio", r.ratio}};
}

void to_json(Json& j, const TaskSummary& s) {
    j = Json{{"task_id", s.task_id},
             {"instance_id", s.instance_id},
             {"surface", s.surface},
             {"progress", {{"done", s.progress.done}, {"total", s.progress.total}}}};
}

void to_json(Json& j, const TaskView& v) {
    j = Json(v.task);
    j["added_substitutes"] = v.added;
    Json verdicts = Json::object();
    for (const auto& [sub, verdict] : v.verdicts) verdicts[sub] = to_string(verdict);
    j["verdicts"] = std::move(verdicts);
    j["progress"] = {{"done", v.progress.done}, {"total", v.progress.total}};
}

void from_json(const Json& j, GeneratorOutputs& g) {
    g.instance_id = j.at("instance_id").get<std::string>();
    g.span = span_from(j.at("span"));
    g.lists = j.at("lists").get<std::vector<ensemble::CandidateList>>();
}

std::vector<AnnotationTask> load_tasks(std::istream& in) {
    std::vector<AnnotationTask> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(Json::parse(line).get<AnnotationTask>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), line_no);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

void save_tasks(std::span<const AnnotationTask> tasks, std::ostream& out) {
    for (const auto& t : tasks) out << Json(t).dump() << '\n';
    if (!out) throw IoError("failed to write tasks");
}

} // namespace lexsimp::annotation
