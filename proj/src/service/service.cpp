#include "livemodel/service.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <random>
#include <thread>

#include "livemodel/instance_io.hpp"
#include "livemodel/wire.hpp"

namespace livemodel {

using Clock = std::chrono::steady_clock;

namespace {

constexpr size_t kMaxEvents = 20000;

struct Slot {
    std::optional<Instance> shown;
    uint64_t generation = 0;
    bool ready = false;
    bool pending = false;
    bool exhausted = false;
    bool representative = false;
    /// The stream was rebuilt since `shown` was found; skip past it before advancing.
    bool need_seek = false;
    std::optional<std::string> error;
};

struct Job {
    enum class Kind { Solve, Advance, Focus };
    Kind kind = Kind::Solve;
    uint64_t generation = 0;
    Category category = Category::StayedValid;
    uint64_t focus = 0;
};

const char* job_name(Job::Kind k) {
    switch (k) {
        case Job::Kind::Solve: return "solve";
        case Job::Kind::Advance: return "advance";
        case Job::Kind::Focus: return "focus";
    }
    return "?";
}

bool became(Category c) { return c == Category::BecameValid || c == Category::BecameInvalid; }

int index_of(Category c) { return static_cast<int>(c); }

/// Raises per-sig bounds so that inst lies within scope.
Scope covering(Scope s, const Schema& schema, const Instance& inst) {
    auto ranges = s.ranges(schema);
    for (size_t t = 0; t < schema.tops.size(); ++t) {
        int c = inst.universe.count(static_cast<int>(t));
        if (c <= ranges[t].second) continue;
        const std::string& name = schema.sigs[schema.tops[t]].name;
        auto it = std::find_if(s.per_sig.begin(), s.per_sig.end(), [&](const auto& p) { return p.first == name; });
        if (it != s.per_sig.end())
            it->second = c;
        else
            s.per_sig.emplace_back(name, c);
    }
    return s;
}

std::string random_id() {
    static std::mutex m;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lk(m);
    static const char* hex = "0123456789abcdef";
    std::string id;
    uint64_t x = rng();
    for (int i = 0; i < 16; ++i) id += hex[(x >> (4 * i)) & 15];
    return id;
}

struct Goal {
    Formula formula;
    std::string id = "$goal";
    std::string text;
};

Goal active_goal(const TypedModel& m, size_t command) {
    Goal g;
    if (command < m.model.commands.size()) {
        g.formula = m.command_goal(command);
        const auto& cmd = m.model.commands[command];
        if (!cmd.pred.empty()) g.id = cmd.pred;
    }
    g.text = to_text(g.formula);
    return g;
}

Scope active_scope(const TypedModel& m, const ServiceOptions& opts) {
    Scope s;
    if (opts.command < m.model.commands.size()) s = Scope::from(m.command_scope(opts.command));
    if (opts.scope) s.default_bound = *opts.scope;
    return s;
}

}  // namespace

class Session {
public:
    Session(std::string id, std::string text, const ServiceOptions& opts)
        : id_(std::move(id)), opts_(opts), t0_(Clock::now()), text_(std::move(text)) {
        auto r = compile(text_);
        diagnostics_ = r.diagnostics;
        log_locked("open", {{"errors", has_errors(diagnostics_)}});
        if (r.model) {
            Plan plan = prepare(r.model, 0, snapshot_locked());
            install_locked(plan);
        } else {
            compile_failed_ = true;
        }
        worker_ = std::thread([this] { run(); });
    }

    ~Session() {
        {
            std::lock_guard lk(m_);
            stop_ = true;
            running_token_.cancel();
        }
        cv_.notify_all();
        worker_.join();
    }

    OpenResult opened() const {
        std::lock_guard lk(m_);
        return {id_, generation_, diagnostics_, last_good_ != nullptr};
    }

    std::string text() const {
        std::lock_guard lk(m_);
        return text_;
    }

    uint64_t generation() const {
        std::lock_guard lk(m_);
        return generation_;
    }

    std::pair<std::vector<Diagnostic>, bool> status() const {
        std::lock_guard lk(m_);
        return {diagnostics_, committed_generation_ != generation_};
    }

    EditResult apply_edit(const TextEdit& e) {
        std::lock_guard el(edit_m_);
        std::string text = this->text();
        if (e.begin > e.end || e.end > text.size())
            throw Error(ErrorCode::InvalidArgument, "edit range outside the model text");
        text.replace(e.begin, e.end - e.begin, e.text);
        return accept(std::move(text));
    }

    EditResult replace_text(std::string text) {
        std::lock_guard el(edit_m_);
        return accept(std::move(text));
    }

    CategoryView category_view(Category c) {
        std::lock_guard lk(m_);
        visible_.insert(c);
        Slot& s = slots_[index_of(c)];
        if (can_schedule_locked() && !s.ready && !s.pending) schedule_locked({Job::Kind::Solve, generation_, c});
        return view_locked(c);
    }

    void request_advance(Category c) {
        std::lock_guard lk(m_);
        visible_.insert(c);
        Slot& s = slots_[index_of(c)];
        if (!can_schedule_locked() || s.pending || s.exhausted || s.error) return;
        schedule_locked({s.ready ? Job::Kind::Advance : Job::Kind::Solve, generation_, c});
    }

    CategoryView view(Category c) const {
        std::lock_guard lk(m_);
        return view_locked(c);
    }

    void set_visible(const std::set<Category>& visible) {
        std::lock_guard lk(m_);
        visible_ = visible;
        for (Category c : visible_) {
            Slot& s = slots_[index_of(c)];
            if (can_schedule_locked() && !s.ready && !s.pending) schedule_locked({Job::Kind::Solve, generation_, c});
        }
    }

    uint64_t pin_focus(std::string_view text, Polarity expected) {
        std::shared_ptr<const Schema> schema;
        {
            std::lock_guard lk(m_);
            if (!last_good_) throw Error(ErrorCode::InvalidArgument, "no compiled model to pin against");
            schema = last_good_->schema;
        }
        size_t first = text.find_first_not_of(" \t\r\n");
        if (first == std::string_view::npos || text[first] != '{')
            return pin_focus(instance_from_text(text, schema), expected);
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, "instance is not valid JSON");
        return pin_focus(instance_from_json(j, schema), expected);
    }

    uint64_t pin_focus(const Instance& inst, Polarity expected) {
        std::lock_guard lk(m_);
        if (!last_good_) throw Error(ErrorCode::InvalidArgument, "no compiled model to pin against");
        Instance aligned = align(*last_good_, inst);
        validate_shape(aligned);
        FocusEntry e;
        e.id = next_focus_++;
        e.instance = std::move(aligned);
        e.expected = expected;
        refresh_focus_locked(e);
        focus_.push_back(e);
        log_locked("pin", {{"entry", e.id}});
        publish_locked({{"kind", "focus"}, {"entry", to_json(view_focus_locked(focus_.back()))}});
        return e.id;
    }

    void unpin_focus(uint64_t entry) {
        std::lock_guard lk(m_);
        auto it = std::find_if(focus_.begin(), focus_.end(), [&](const FocusEntry& e) { return e.id == entry; });
        if (it == focus_.end()) throw Error(ErrorCode::InvalidArgument, "no focus entry " + std::to_string(entry));
        focus_.erase(it);
        publish_locked({{"kind", "unpin"}, {"entry", entry}});
    }

    std::vector<FocusEntry> focus() const {
        std::lock_guard lk(m_);
        std::vector<FocusEntry> out;
        for (const auto& e : focus_) out.push_back(view_focus_locked(e));
        return out;
    }

    SuggestionResult suggestions(size_t offset, const AnnotationSource& source) {
        std::string text;
        std::shared_ptr<const TypedModel> model;
        std::optional<Instance> inst;
        {
            std::lock_guard lk(m_);
            text = text_;
            model = last_good_;
            inst = annotation_locked(source);
        }
        if (!model) throw Error(ErrorCode::NoPrefixContext, "no compiled model");
        if (offset > text.size()) throw Error(ErrorCode::InvalidArgument, "cursor offset outside the model text");
        CompletionContext ctx = completion_context(text, offset, *model);
        if (inst) {
            try {
                inst = align(*model, *inst);
            } catch (const Error&) {
                inst.reset();
            }
        }
        SuggestionResult r;
        r.list = suggest(*model, ctx, inst ? &*inst : nullptr);
        r.schema = model->schema;
        r.instance = std::move(inst);
        return r;
    }

    void flush() {
        {
            std::lock_guard lk(m_);
            if (commit_due_) commit_due_ = Clock::now();
        }
        cv_.notify_all();
    }

    bool wait_idle(std::chrono::milliseconds timeout) {
        std::unique_lock lk(m_);
        return idle_cv_.wait_for(lk, timeout, [&] { return !running_ && jobs_.empty() && !commit_due_; });
    }

    std::vector<SessionEvent> events() const {
        std::lock_guard lk(m_);
        return {events_.begin(), events_.end()};
    }

    uint64_t subscribe(Subscriber fn) {
        std::lock_guard lk(m_);
        uint64_t token = next_sub_++;
        subs_[token] = std::move(fn);
        return token;
    }

    void unsubscribe(uint64_t token) {
        std::lock_guard lk(m_);
        subs_.erase(token);
    }

private:
    struct Snapshot {
        std::shared_ptr<const TypedModel> last_good;
        std::optional<std::string> goal_text;
        std::array<std::optional<Instance>, 4> shown;
    };

    struct Plan {
        uint64_t generation = 0;
        std::shared_ptr<const TypedModel> model;
        bool same = false;
        Goal goal;
        Scope scope;
        bool has_previous = false;
        std::shared_ptr<CategoryStreams> streams;
        std::optional<std::string> error;
        std::array<std::optional<Instance>, 4> kept;
    };

    Snapshot snapshot_locked() const {
        Snapshot s;
        s.last_good = last_good_;
        s.goal_text = goal_text_;
        for (int i = 0; i < 4; ++i)
            if (slots_[i].ready) s.shown[i] = slots_[i].shown;
        return s;
    }

    SearchControl control(const CancelToken& token) const {
        SearchControl c;
        c.cancel = token;
        c.artificial_delay = opts_.solve_delay;
        c.budget_log2 = opts_.budget_log2;
        c.poll_interval = opts_.poll_interval;
        return c;
    }

    /// Everything a commit needs that can be computed without the lock.
    Plan prepare(std::shared_ptr<const TypedModel> model, uint64_t gen, const Snapshot& snap) const {
        Plan p;
        p.generation = gen;
        p.model = model;
        p.goal = active_goal(*model, opts_.command);
        p.scope = active_scope(*model, opts_);
        p.same = snap.last_good && pretty_print(snap.last_good->model) == pretty_print(model->model);

        Formula old_goal = p.goal.formula;
        if (p.same) {
            p.has_previous = has_previous_;
        } else if (snap.goal_text && *snap.goal_text != p.goal.text) {
            auto r = parse_formula(*snap.goal_text, *model);
            if (r.formula) {
                old_goal = *r.formula;
                p.has_previous = true;
            }
        }
        if (p.same && has_previous_) old_goal = old_goal_;
        try {
            p.streams = std::make_shared<CategoryStreams>(
                categorize(model, old_goal, p.goal.formula, p.scope, control(CancelToken{})));
        } catch (const Error& e) {
            p.error = std::string(to_string(e.code())) + ": " + e.what();
            return p;
        }
        for (Category c : kCategories) {
            const auto& shown = snap.shown[index_of(c)];
            if (!shown || (became(c) && !p.has_previous)) continue;
            try {
                Instance inst = align(*model, *shown);
                if (p.same || is_representative(inst, *p.streams, c)) p.kept[index_of(c)] = std::move(inst);
            } catch (const Error&) {
            }
        }
        return p;
    }

    void install_locked(const Plan& p) {
        bool same = p.same;
        last_good_ = p.model;
        committed_generation_ = p.generation;
        if (!same) {
            old_goal_ = p.streams ? p.streams->old_goal : Formula{};
            has_previous_ = p.has_previous;
        }
        goal_ = p.goal;
        goal_text_ = p.goal.text;
        scope_ = p.scope;
        streams_ = p.streams;
        log_locked(same ? "recompute_skipped" : "recompute", {{"previousGoal", has_previous_}});

        for (Category c : kCategories) {
            Slot& s = slots_[index_of(c)];
            Slot next;
            next.generation = p.generation;
            if (same && s.ready && !p.error) {
                next = s;
                next.generation = p.generation;
                next.need_seek = s.shown.has_value();
                if (next.shown) next.shown = align(*last_good_, *next.shown);
            } else if (p.error) {
                next.ready = true;
                next.exhausted = true;
                next.error = p.error;
            } else if (became(c) && !has_previous_) {
                next.ready = true;
                next.exhausted = true;
            } else if (p.kept[index_of(c)]) {
                next.shown = p.kept[index_of(c)];
                next.ready = true;
                next.representative = true;
                next.need_seek = true;
            }
            s = std::move(next);
            if (!s.ready && visible_.count(c)) schedule_locked({Job::Kind::Solve, p.generation, c});
        }
        for (auto& e : focus_) {
            try {
                e.instance = align(*last_good_, e.instance);
            } catch (const Error& err) {
                e.error = err.what();
                e.current.reset();
                e.closest.reset();
                e.breakdown.reset();
                e.pending = false;
                e.generation = p.generation;
                continue;
            }
            e.error.reset();
            if (same && e.closest) {
                e.closest->instance = align(*last_good_, e.closest->instance);
                e.breakdown = breakdown(*last_good_, goal_.formula, e.instance, e.closest->instance, goal_.id);
                e.generation = p.generation;
                continue;
            }
            refresh_focus_locked(e);
        }
        json views = json::array();
        for (Category c : kCategories) views.push_back(to_json(view_locked(c)));
        json focus = json::array();
        for (const auto& e : focus_) focus.push_back(to_json(view_focus_locked(e)));
        publish_locked({{"kind", "recompute"}, {"views", views}, {"focus", focus}});
    }

    /// Recomputes the status of an entry and queues its closest search on a mismatch.
    void refresh_focus_locked(FocusEntry& e) {
        e.generation = committed_generation_;
        e.closest.reset();
        e.breakdown.reset();
        e.pending = false;
        if (!last_good_) return;
        e.current = satisfies(*last_good_, e.instance, goal_.formula) ? Polarity::Valid : Polarity::Invalid;
        if (*e.current == e.expected) return;
        e.pending = true;
        if (can_schedule_locked()) schedule_locked({Job::Kind::Focus, generation_, Category::StayedValid, e.id});
    }

    bool can_schedule_locked() const { return streams_ && committed_generation_ == generation_; }

    void schedule_locked(Job job) {
        if (job.kind != Job::Kind::Focus) slots_[index_of(job.category)].pending = true;
        jobs_.push_back(job);
        cv_.notify_all();
    }

    CategoryView view_locked(Category c) const {
        const Slot& s = slots_[index_of(c)];
        CategoryView v;
        v.category = c;
        v.generation = s.generation;
        v.instance = s.shown;
        v.stale = s.generation != generation_;
        v.representative = s.representative;
        v.pending = s.pending;
        v.exhausted = s.exhausted;
        v.error = s.error;
        return v;
    }

    FocusEntry view_focus_locked(const FocusEntry& e) const {
        FocusEntry out = e;
        out.stale = e.generation != generation_;
        return out;
    }

    std::optional<Instance> annotation_locked(const AnnotationSource& src) const {
        using K = AnnotationSource::Kind;
        switch (src.kind) {
            case K::None: return std::nullopt;
            case K::Focus:
                for (const auto& e : focus_)
                    if (e.id == src.focus) return e.instance;
                throw Error(ErrorCode::InvalidArgument, "no focus entry " + std::to_string(src.focus));
            case K::Category: return slots_[index_of(src.category)].shown;
            case K::Auto:
                if (!focus_.empty()) return focus_.front().instance;
                for (Category c : kCategories)
                    if (slots_[index_of(c)].shown) return slots_[index_of(c)].shown;
                return std::nullopt;
        }
        return std::nullopt;
    }

    EditResult accept(std::string text) {
        auto r = compile(text);
        std::lock_guard lk(m_);
        ++generation_;
        bool was_running = running_;
        running_token_.cancel();
        jobs_.clear();
        for (auto& s : slots_) s.pending = false;
        text_ = std::move(text);
        diagnostics_ = r.diagnostics;
        log_locked("edit", {{"cancelled", was_running}, {"errors", has_errors(diagnostics_)}});
        if (r.model) {
            compile_failed_ = false;
            pending_model_ = r.model;
            commit_due_ = Clock::now() + opts_.debounce;
        } else {
            compile_failed_ = true;
            pending_model_.reset();
            commit_due_.reset();
        }
        publish_locked({{"kind", "diagnostics"}, {"diagnostics", to_json(diagnostics_)}, {"stale", true}});
        cv_.notify_all();
        return {generation_, diagnostics_};
    }

    void run() {
        std::unique_lock lk(m_);
        while (!stop_) {
            if (commit_due_ && Clock::now() >= *commit_due_) {
                commit_due_.reset();
                auto model = std::move(pending_model_);
                uint64_t gen = generation_;
                Snapshot snap = snapshot_locked();
                running_ = true;
                lk.unlock();
                std::optional<Plan> plan;
                std::optional<std::string> failure;
                try {
                    plan = prepare(model, gen, snap);
                } catch (const std::exception& e) {
                    failure = e.what();
                }
                lk.lock();
                running_ = false;
                if (failure) {
                    log_locked("internal_error", {{"message", *failure}}, gen);
                } else if (gen == generation_) {
                    install_locked(*plan);
                } else {
                    log_locked("result_discarded", {{"job", "recompute"}}, gen);
                }
                idle_cv_.notify_all();
                continue;
            }
            if (!jobs_.empty()) {
                Job job = jobs_.front();
                jobs_.pop_front();
                run_job(lk, job);
                idle_cv_.notify_all();
                continue;
            }
            idle_cv_.notify_all();
            if (commit_due_)
                cv_.wait_until(lk, *commit_due_);
            else
                cv_.wait(lk);
        }
    }

    /// Runs one job with the lock released; results are installed only if no newer
    /// generation exists by the time the job finishes.
    void run_job(std::unique_lock<std::mutex>& lk, const Job& job) {
        if (job.generation != generation_ || !streams_) return;
        CancelToken token;
        running_token_ = token;
        running_ = true;
        auto streams = streams_;
        auto model = last_good_;
        Goal goal = goal_;
        Scope scope = scope_;
        Slot slot = job.kind == Job::Kind::Focus ? Slot{} : slots_[index_of(job.category)];
        std::optional<Instance> target;
        json detail = {{"job", job_name(job.kind)}};
        if (job.kind == Job::Kind::Focus) {
            detail["entry"] = job.focus;
            for (const auto& e : focus_)
                if (e.id == job.focus) target = e.instance;
            if (!target) {
                running_ = false;
                return;
            }
        } else {
            detail["category"] = to_string(job.category);
        }
        Polarity expected = Polarity::Valid;
        for (const auto& e : focus_)
            if (e.id == job.focus) expected = e.expected;
        log_locked("solve_started", detail, job.generation);
        lk.unlock();

        std::optional<Instance> found;
        std::optional<ClosestResult> near;
        std::optional<BreakdownReport> report;
        std::optional<std::string> error;
        bool cancelled = false;
        try {
            if (job.kind == Job::Kind::Focus) {
                near = closest(*model, goal.formula, *target, expected, covering(scope, *model->schema, *target),
                               control(token));
                if (near) report = breakdown(*model, goal.formula, *target, near->instance, goal.id);
            } else {
                SolutionCursor& cursor = streams->at(job.category);
                cursor.set_control(control(token));
                if (job.kind == Job::Kind::Advance && slot.need_seek && slot.shown) cursor.seek_past(*slot.shown);
                found = cursor.next();
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Cancelled)
                cancelled = true;
            else
                error = std::string(to_string(e.code())) + ": " + e.what();
        } catch (const std::exception& e) {
            error = e.what();
        }

        lk.lock();
        running_ = false;
        if (cancelled) {
            log_locked("solve_cancelled", detail, job.generation);
            return;
        }
        log_locked("solve_finished", detail, job.generation);
        if (job.generation != generation_) {
            log_locked("result_discarded", detail, job.generation);
            return;
        }
        if (job.kind == Job::Kind::Focus) {
            for (auto& e : focus_) {
                if (e.id != job.focus) continue;
                e.pending = false;
                e.closest = near;
                e.breakdown = report;
                e.error = error;
                e.generation = job.generation;
                log_locked("focus_published", detail, job.generation);
                publish_locked({{"kind", "focus"}, {"entry", to_json(view_focus_locked(e))}});
            }
            return;
        }
        Slot& s = slots_[index_of(job.category)];
        s.pending = false;
        s.generation = job.generation;
        s.need_seek = false;
        s.error = error;
        if (found) {
            s.shown = std::move(found);
            s.representative = true;
        } else if (!error) {
            s.exhausted = true;
            if (!s.ready) s.shown.reset();
        }
        s.ready = true;
        log_locked("view_published", detail, job.generation);
        publish_locked({{"kind", "category"}, {"view", to_json(view_locked(job.category))}});
    }

    void log_locked(std::string kind, json detail, std::optional<uint64_t> gen = std::nullopt) {
        SessionEvent e;
        e.seq = next_seq_++;
        e.t_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0_).count();
        e.generation = gen ? *gen : generation_;
        e.kind = std::move(kind);
        e.detail = std::move(detail);
        events_.push_back(std::move(e));
        if (events_.size() > kMaxEvents) events_.pop_front();
    }

    void publish_locked(json delta) {
        if (subs_.empty()) return;
        json msg = {{"session", id_}, {"generation", generation_}, {"viewDelta", std::move(delta)}};
        for (auto& [token, fn] : subs_) fn(msg);
    }

    const std::string id_;
    const ServiceOptions opts_;
    const Clock::time_point t0_;

    mutable std::mutex m_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::mutex edit_m_;

    std::string text_;
    uint64_t generation_ = 0;
    std::vector<Diagnostic> diagnostics_;
    bool compile_failed_ = false;
    std::shared_ptr<const TypedModel> pending_model_;
    std::optional<Clock::time_point> commit_due_;

    std::shared_ptr<const TypedModel> last_good_;
    uint64_t committed_generation_ = 0;
    std::optional<std::string> goal_text_;
    Formula old_goal_;
    bool has_previous_ = false;
    Goal goal_;
    Scope scope_;
    std::shared_ptr<CategoryStreams> streams_;
    std::array<Slot, 4> slots_;
    std::set<Category> visible_{kCategories.begin(), kCategories.end()};
    std::vector<FocusEntry> focus_;
    uint64_t next_focus_ = 1;

    std::deque<Job> jobs_;
    bool running_ = false;
    CancelToken running_token_;
    bool stop_ = false;

    std::deque<SessionEvent> events_;
    uint64_t next_seq_ = 1;
    std::map<uint64_t, Subscriber> subs_;
    uint64_t next_sub_ = 1;

    std::thread worker_;
};

Workbench::Workbench(ServiceOptions options) : options_(options) {}

Workbench::~Workbench() {
    std::map<std::string, std::shared_ptr<Session>> sessions;
    {
        std::lock_guard lk(m_);
        sessions.swap(sessions_);
    }
}

std::shared_ptr<Session> Workbench::get(const std::string& id) const {
    std::lock_guard lk(m_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::SessionNotFound, "no session '" + id + "'");
    return it->second;
}

OpenResult Workbench::open_session(std::string text) {
    std::string id = random_id();
    auto s = std::make_shared<Session>(id, std::move(text), options_);
    OpenResult r = s->opened();
    std::lock_guard lk(m_);
    sessions_[id] = std::move(s);
    return r;
}

void Workbench::close_session(const std::string& id) {
    std::shared_ptr<Session> s;
    {
        std::lock_guard lk(m_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error(ErrorCode::SessionNotFound, "no session '" + id + "'");
        s = std::move(it->second);
        sessions_.erase(it);
    }
}

std::vector<std::string> Workbench::sessions() const {
    std::lock_guard lk(m_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
}

std::string Workbench::text(const std::string& id) const { return get(id)->text(); }
uint64_t Workbench::generation(const std::string& id) const { return get(id)->generation(); }
std::pair<std::vector<Diagnostic>, bool> Workbench::status(const std::string& id) const { return get(id)->status(); }

EditResult Workbench::apply_edit(const std::string& id, const TextEdit& edit) { return get(id)->apply_edit(edit); }
EditResult Workbench::replace_text(const std::string& id, std::string text) {
    return get(id)->replace_text(std::move(text));
}

CategoryView Workbench::category_view(const std::string& id, Category c) { return get(id)->category_view(c); }
void Workbench::request_advance(const std::string& id, Category c) { get(id)->request_advance(c); }

CategoryView Workbench::advance_category(const std::string& id, Category c, std::chrono::milliseconds timeout) {
    auto s = get(id);
    s->category_view(c);
    s->wait_idle(timeout);
    s->request_advance(c);
    s->wait_idle(timeout);
    return s->view(c);
}

void Workbench::set_visible(const std::string& id, const std::set<Category>& visible) {
    get(id)->set_visible(visible);
}

uint64_t Workbench::pin_focus(const std::string& id, std::string_view instance, Polarity expected) {
    return get(id)->pin_focus(instance, expected);
}
uint64_t Workbench::pin_focus(const std::string& id, const Instance& instance, Polarity expected) {
    return get(id)->pin_focus(instance, expected);
}
void Workbench::unpin_focus(const std::string& id, uint64_t entry) { get(id)->unpin_focus(entry); }
std::vector<FocusEntry> Workbench::focus(const std::string& id) const { return get(id)->focus(); }

SuggestionResult Workbench::suggestions(const std::string& id, size_t offset, const AnnotationSource& source) {
    return get(id)->suggestions(offset, source);
}

void Workbench::flush(const std::string& id) { get(id)->flush(); }
bool Workbench::wait_idle(const std::string& id, std::chrono::milliseconds timeout) {
    return get(id)->wait_idle(timeout);
}
std::vector<SessionEvent> Workbench::events(const std::string& id) const { return get(id)->events(); }
uint64_t Workbench::subscribe(const std::string& id, Subscriber fn) { return get(id)->subscribe(std::move(fn)); }
void Workbench::unsubscribe(const std::string& id, uint64_t token) { get(id)->unsubscribe(token); }

json to_json(const CategoryView& v) {
    json j = {{"category", to_string(v.category)},
              {"generation", v.generation},
              {"instance", v.instance ? instance_to_json(*v.instance) : json(nullptr)},
              {"stale", v.stale},
              {"representative", v.representative},
              {"pending", v.pending},
              {"exhausted", v.exhausted}};
    if (v.error) j["error"] = *v.error;
    return j;
}

json to_json(const FocusEntry& e) {
    json j = {{"id", e.id},
              {"instance", instance_to_json(e.instance)},
              {"expected", to_string(e.expected)},
              {"current", e.current ? json(to_string(*e.current)) : json(nullptr)},
              {"generation", e.generation},
              {"stale", e.stale},
              {"pending", e.pending},
              {"closest", e.closest ? to_json(*e.closest) : json(nullptr)},
              {"breakdown", e.breakdown && e.closest ? to_json(*e.breakdown, e.instance, e.closest->instance)
                                                     : json(nullptr)}};
    if (e.error) j["error"] = *e.error;
    return j;
}

json to_json(const SessionEvent& e) {
    return {{"seq", e.seq}, {"t", e.t_ms}, {"generation", e.generation}, {"kind", e.kind}, {"detail", e.detail}};
}

json to_json(const SuggestionResult& r) {
    return to_json(r.list, *r.schema, r.instance ? &*r.instance : nullptr);
}

}  // namespace livemodel
