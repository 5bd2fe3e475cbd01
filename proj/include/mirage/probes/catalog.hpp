#pragma once

#include <set>
#include <string>
#include <vector>

#include "mirage/envmodel/api_surface.hpp"

namespace mirage::probes {

enum class Category { Debugger, Av, Vm };

const char* to_string(Category c);

// The nine artifact families, plus ApiBehavior for the two checks that carry
// boolean evidence instead of watchlist artifacts (the being-debugged flag
// and the static-cursor read).
enum class ArtifactKind {
    ProcessNames,
    WindowNames,
    DebuggerRegisters,
    ImportedFunctions,
    RegistryNamesValues,
    FolderNames,
    DllNames,
    Usernames,
    MacAddresses,
    ApiBehavior,
};

const char* to_string(ArtifactKind k);

enum class ProbeId {
    ProcNames,
    WindowNames,
    DebuggerFlag,
    HwDebugRegisters,
    ModuleExports,
    RegistryArtifacts,
    FolderNames,
    DllNames,
    Usernames,
    MacPrefixes,
    CursorStatic,
};

struct Probe {
    ProbeId id;
    std::string name;
    std::set<Category> categories;
    ArtifactKind artifact_kind;
    std::vector<envmodel::ApiFunction> api_plan;
    std::string watchlist_key;  // empty for boolean-evidence probes
};

// The fixed probe catalog: 11 probes covering the nine artifact families
// across the Debugger / AV / VM categories, plus the static-cursor check.
const std::vector<Probe>& probe_catalog();

}  // namespace mirage::probes
