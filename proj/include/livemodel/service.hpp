#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "livemodel/complete.hpp"
#include "livemodel/finder.hpp"
#include "livemodel/proximity.hpp"

namespace livemodel {

struct ServiceOptions {
    /// Quiet period after an edit before the model is recompiled and views recomputed.
    std::chrono::milliseconds debounce{300};
    /// Injected before every solve; cancellable. Simulates slow solving.
    std::chrono::milliseconds solve_delay{0};
    int budget_log2 = 40;
    uint32_t poll_interval = 1024;
    /// Replaces the command's default bound (per-sig bounds are kept).
    std::optional<int> scope;
    /// Run command that defines the active goal.
    size_t command = 0;
};

/// Replaces bytes [begin, end) of the model text.
struct TextEdit {
    size_t begin = 0;
    size_t end = 0;
    std::string text;
};

struct EditResult {
    uint64_t generation = 0;
    std::vector<Diagnostic> diagnostics;
};

struct OpenResult {
    std::string id;
    uint64_t generation = 0;
    std::vector<Diagnostic> diagnostics;
    bool compiled = false;
};

struct CategoryView {
    Category category = Category::StayedValid;
    /// Generation the content was computed for.
    uint64_t generation = 0;
    std::optional<Instance> instance;
    bool stale = false;
    bool representative = false;
    bool pending = false;
    bool exhausted = false;
    std::optional<std::string> error;
};

struct FocusEntry {
    uint64_t id = 0;
    Instance instance;
    Polarity expected = Polarity::Valid;
    /// Current status under the active goal; absent until a model has compiled.
    std::optional<Polarity> current;
    uint64_t generation = 0;
    bool stale = false;
    bool pending = false;
    std::optional<ClosestResult> closest;
    std::optional<BreakdownReport> breakdown;
    std::optional<std::string> error;
};

/// Instance used to annotate suggestion values.
struct AnnotationSource {
    enum class Kind { Auto, None, Focus, Category };
    Kind kind = Kind::Auto;
    uint64_t focus = 0;
    Category category = Category::StayedValid;
};

struct SuggestionResult {
    SuggestionList list;
    std::shared_ptr<const Schema> schema;
    /// Instance the values were computed over.
    std::optional<Instance> instance;
};

/// Entry of a session's event log. `t_ms` is measured from session creation.
struct SessionEvent {
    uint64_t seq = 0;
    double t_ms = 0;
    uint64_t generation = 0;
    std::string kind;
    nlohmann::json detail;
};

/// Receives {session, generation, viewDelta} messages. Called with the session lock
/// held, in generation order; must not call back into the workbench.
using Subscriber = std::function<void(const nlohmann::json&)>;

class Session;

/// Registry of isolated live-editing sessions.
class Workbench {
public:
    explicit Workbench(ServiceOptions options = {});
    ~Workbench();
    Workbench(const Workbench&) = delete;
    Workbench& operator=(const Workbench&) = delete;

    const ServiceOptions& options() const { return options_; }

    OpenResult open_session(std::string text);
    void close_session(const std::string& id);
    std::vector<std::string> sessions() const;

    std::string text(const std::string& id) const;
    uint64_t generation(const std::string& id) const;
    /// Diagnostics of the current text, and whether views are frozen on an older model.
    std::pair<std::vector<Diagnostic>, bool> status(const std::string& id) const;

    EditResult apply_edit(const std::string& id, const TextEdit& edit);
    EditResult replace_text(const std::string& id, std::string text);

    /// Current view; requesting a category makes it visible and starts its solve if needed.
    CategoryView category_view(const std::string& id, Category c);
    /// Requests the next instance of the category stream. Asynchronous: poll the view
    /// or wait_idle.
    void request_advance(const std::string& id, Category c);
    /// request_advance, wait_idle, then the view.
    CategoryView advance_category(const std::string& id, Category c,
                                  std::chrono::milliseconds timeout = std::chrono::seconds(60));
    void set_visible(const std::string& id, const std::set<Category>& visible);

    /// Pins an instance given as assignment text or wire JSON. Throws StructuralMismatch
    /// or InvalidArgument when it does not fit the last compiled model.
    uint64_t pin_focus(const std::string& id, std::string_view instance, Polarity expected);
    uint64_t pin_focus(const std::string& id, const Instance& instance, Polarity expected);
    void unpin_focus(const std::string& id, uint64_t entry);
    std::vector<FocusEntry> focus(const std::string& id) const;

    /// Throws NoPrefixContext or VacuousPrefix.
    SuggestionResult suggestions(const std::string& id, size_t offset, const AnnotationSource& source = {});

    /// Starts the pending recompile now instead of after the debounce window.
    void flush(const std::string& id);
    /// Waits until no recompile is pending and no background job is queued or running.
    bool wait_idle(const std::string& id, std::chrono::milliseconds timeout = std::chrono::seconds(60));

    std::vector<SessionEvent> events(const std::string& id) const;

    uint64_t subscribe(const std::string& id, Subscriber fn);
    void unsubscribe(const std::string& id, uint64_t token);

private:
    std::shared_ptr<Session> get(const std::string& id) const;

    ServiceOptions options_;
    mutable std::mutex m_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

nlohmann::json to_json(const CategoryView& v);
nlohmann::json to_json(const FocusEntry& e);
nlohmann::json to_json(const SessionEvent& e);
nlohmann::json to_json(const SuggestionResult& r);

}  // namespace livemodel
