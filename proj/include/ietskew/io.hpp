#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ietskew/cocycle.hpp"
#include "ietskew/ergolab.hpp"
#include "ietskew/good_returns.hpp"
#include "ietskew/induction.hpp"
#include "ietskew/spectrum.hpp"

namespace ietskew {

// Insertion-ordered so dumps are stable and read in a sensible order.
using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "0.1.0";

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Artifact header: version, digest of the canonical config dump, the config itself.
Json stamp(const Json& config, Json body);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Pretty dump with a trailing newline.
std::string dump(const Json& j);

// A JSON scalar: "num/den" or decimal string, or a number (taken exactly).
Rational rational_from_json(const Json& j);

struct IetDescriptor {
    ScalarMode mode = ScalarMode::Rational;
    // Exact lengths; float descriptors store the doubles exactly.
    Iet iet;
};

IetDescriptor iet_from_json(const Json& j);
Json iet_to_json(const Iet& iet, ScalarMode mode = ScalarMode::Rational);

struct CocycleDescriptor {
    ScalarMode mode = ScalarMode::Rational;
    StepCocycle f;
};

// Float descriptors may miss mean zero by rounding; they must be within 1e-12.
CocycleDescriptor cocycle_from_json(const Json& j);
Json cocycle_to_json(const StepCocycle& f, ScalarMode mode = ScalarMode::Rational);

Json permutation_to_json(const Permutation& p);
Permutation permutation_from_json(const Json& j);
Json path_to_json(const RauzyPath& path);
RauzyPath path_from_json(const Json& j);
// Row-major; entries beyond 64 bits are written as decimal strings.
Json matrix_to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const Json& j);
Json bigint_to_json(const BigInt& v);
BigInt bigint_from_json(const Json& j);

Json balanced_domain_json(const BalancedDomain& u);
Json balanced_times_json(const BalancedTimes& bt);
Json recurrence_json(const RecurrenceHit& hit);
Json good_return_json(const GoodReturn& g);
GoodReturn good_return_from_json(const Json& j);
Json good_return_check_json(const GoodReturnCheck& c);

Json lyapunov_json(const LyapunovEstimate& e);
Json slope_json(const SlopeFit& fit);
Json deviation_json(const DeviationScan& scan);
std::string deviation_csv(const DeviationScan& scan);

Json probe_json(const ProbeReport& report);
Json histograms_json(const std::vector<FiberHistogram>& hists);
std::string histograms_csv(const std::vector<FiberHistogram>& hists);
Json birkhoff_measure_json(const EmpiricalBirkhoffMeasure& m);

}  // namespace ietskew
