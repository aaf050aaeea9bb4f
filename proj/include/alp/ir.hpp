#pragma once

// Static program representation and its dynamic unrolling.
//
// A SegmentProgram is a flat control-flow graph of segments (basic blocks of
// abstract instructions). Each segment body runs `trip` times per visit; a
// LoopRegion repeats a contiguous run of segments. Registers are virtual and
// unbounded since all analysis happens before register allocation.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alp/common.hpp"

namespace alp {

enum class InstrKind : std::uint8_t { compute, load, store, branch };
enum class Pattern : std::uint8_t { sequential, random };

std::string_view to_string(InstrKind k);
InstrKind instr_kind_from_string(std::string_view s);

struct AccessSpec {
    std::string array;
    Pattern pattern = Pattern::sequential;
    std::int64_t stride = 1;    // elements; sequential only
    std::string seed_role;      // random only
    std::uint32_t element_size = 8;

    friend bool operator==(const AccessSpec&, const AccessSpec&) = default;
};

struct AbstractInstr {
    Pc pc = 0;
    InstrKind kind = InstrKind::compute;
    std::set<Reg> defs;
    std::set<Reg> uses;
    std::optional<AccessSpec> access;

    bool is_memory() const { return kind == InstrKind::load || kind == InstrKind::store; }
    friend bool operator==(const AbstractInstr&, const AbstractInstr&) = default;
};

struct Segment {
    SegmentId id = 0;
    std::vector<AbstractInstr> body;
    std::string trip;  // product expression over parameters, e.g. "n_reuse*N"

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct CfgEdge {
    SegmentId from = 0;
    SegmentId to = 0;
    friend auto operator<=>(const CfgEdge&, const CfgEdge&) = default;
};

struct DivergenceGroup {
    SegmentId source = 0;
    std::vector<SegmentId> arms;
    SegmentId join = 0;
    friend bool operator==(const DivergenceGroup&, const DivergenceGroup&) = default;
};

struct ArrayDecl {
    std::string id;
    std::string length;  // parameter expression, in elements
    std::uint32_t element_size = 8;
    friend bool operator==(const ArrayDecl&, const ArrayDecl&) = default;
};

struct LoopRegion {
    std::vector<SegmentId> members;  // contiguous in declaration order
    std::string repeat;
    friend bool operator==(const LoopRegion&, const LoopRegion&) = default;
};

struct SegmentProgram {
    std::vector<Segment> segments;
    std::vector<CfgEdge> edges;
    std::vector<DivergenceGroup> divergences;
    std::vector<ArrayDecl> arrays;
    std::vector<LoopRegion> loops;
    std::set<Reg> live_in;

    const Segment& segment(SegmentId id) const;
    bool has_segment(SegmentId id) const;
    std::size_t index_of(SegmentId id) const;
    std::vector<SegmentId> successors(SegmentId id) const;
    std::vector<SegmentId> predecessors(SegmentId id) const;
    const ArrayDecl& array(const std::string& id) const;
    const AbstractInstr* find_instr(Pc pc) const;
    SegmentId segment_of_pc(Pc pc) const;

    friend bool operator==(const SegmentProgram&, const SegmentProgram&) = default;
};

using ParamMap = std::map<std::string, std::int64_t>;

/// A program together with the parameter bindings it is evaluated and
/// profiled with.
struct Workload {
    std::string name = "workload";
    SegmentProgram program;
    ParamMap params;
    ParamMap profile_params;  // overrides applied on top of params when profiling
    std::uint64_t seed = 1;

    ParamMap profiling_params() const;
    friend bool operator==(const Workload&, const Workload&) = default;
};

/// Validates a drafted program. Throws MalformedSpec.
SegmentProgram build_program(SegmentProgram draft);

/// Evaluates a product expression ("a*b*4"). Throws UnboundParameter.
std::int64_t eval_expr(const std::string& expr, const ParamMap& params);

// -- dynamic trace -----------------------------------------------------------

struct TraceRecord {
    std::uint64_t seq = 0;
    SegmentId segment = 0;
    Pc pc = 0;
    InstrKind kind = InstrKind::compute;
    std::optional<Addr> address;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct DynamicTrace {
    std::vector<TraceRecord> records;
    friend bool operator==(const DynamicTrace&, const DynamicTrace&) = default;
};

/// A maximal run of consecutive records with one segment id.
struct InstanceSpan {
    SegmentId segment = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<InstanceSpan> segment_instances(const DynamicTrace& trace);

/// 64-bit LCG shared by every generator so traces reproduce across languages.
class Lcg {
  public:
    static constexpr std::uint64_t kMul = 6364136223846793005ULL;
    static constexpr std::uint64_t kInc = 1442695040888963407ULL;

    explicit Lcg(std::uint64_t state) : state_(state) {}
    std::uint64_t next() {
        state_ = kMul * state_ + kInc;
        return state_;
    }
    std::uint64_t index(std::uint64_t length) { return (next() >> 33) % length; }
    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t stream_seed(std::uint64_t seed, std::string_view array, std::string_view role);

inline constexpr Addr kArrayBase = 0x1000'0000;
inline constexpr Addr kArrayAlign = 4096;

struct ArrayLayout {
    std::map<std::string, Addr> base;
    std::map<std::string, std::uint64_t> length;  // elements
    std::map<std::string, std::uint32_t> element_size;
    std::uint64_t bytes(const std::string& id) const;
};

ArrayLayout layout_arrays(const SegmentProgram& p, const ParamMap& params);

/// Instruction count implied by trip counts and loop repeats.
std::uint64_t analytic_length(const SegmentProgram& p, const ParamMap& params);

/// Deterministic unrolling. Throws UnboundParameter.
DynamicTrace unroll_trace(const SegmentProgram& p, const ParamMap& params, std::uint64_t seed);

}  // namespace alp
