#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace alp {

using SegmentId = std::uint32_t;
using Reg = std::uint32_t;
using Pc = std::uint64_t;
using Addr = std::uint64_t;
using LineAddr = std::uint64_t;

/// Simulation time. One core cycle is kTicksPerCycle ticks, so fractional
/// per-instruction issue and sub-cycle line serialization stay integral.
using Tick = std::uint64_t;
inline constexpr Tick kTicksPerCycle = 64;

inline constexpr std::uint32_t kLineBytes = 64;
inline constexpr std::uint32_t kLineBits = kLineBytes * 8;

inline constexpr LineAddr line_of(Addr a) { return a / kLineBytes; }

enum class Side : std::uint8_t { host, ndp };

inline constexpr Side other(Side s) { return s == Side::host ? Side::ndp : Side::host; }
inline constexpr std::string_view to_string(Side s) { return s == Side::host ? "host" : "ndp"; }

inline constexpr std::uint64_t ticks_to_cycles(Tick t) {
    return (t + kTicksPerCycle - 1) / kTicksPerCycle;
}

// Error hierarchy. Each maps to one named failure of a module contract.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define ALP_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                  \
      public:                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

ALP_DEFINE_ERROR(MalformedSpec);
ALP_DEFINE_ERROR(UnboundParameter);
ALP_DEFINE_ERROR(ParameterError);
ALP_DEFINE_ERROR(ParseError);
ALP_DEFINE_ERROR(DegenerateSegments);
ALP_DEFINE_ERROR(EmptyCorpus);
ALP_DEFINE_ERROR(InconsistentTrace);
ALP_DEFINE_ERROR(PlacementGap);
ALP_DEFINE_ERROR(NotOwner);
ALP_DEFINE_ERROR(NoHistory);
ALP_DEFINE_ERROR(NotTransferCluster);
ALP_DEFINE_ERROR(IOFailure);
ALP_DEFINE_ERROR(ConfigError);

#undef ALP_DEFINE_ERROR

}  // namespace alp
