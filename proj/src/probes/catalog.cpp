#include "mirage/probes/catalog.hpp"

#include "mirage/probes/watchlists.hpp"

namespace mirage::probes {

using envmodel::ApiFunction;

const char* to_string(Category c) {
    switch (c) {
        case Category::Debugger: return "debugger";
        case Category::Av: return "av";
        case Category::Vm: return "vm";
    }
    return "?";
}

const char* to_string(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::ProcessNames: return "process_names";
        case ArtifactKind::WindowNames: return "window_names";
        case ArtifactKind::DebuggerRegisters: return "debugger_registers";
        case ArtifactKind::ImportedFunctions: return "imported_functions";
        case ArtifactKind::RegistryNamesValues: return "registry_names_values";
        case ArtifactKind::FolderNames: return "folder_names";
        case ArtifactKind::DllNames: return "dll_names";
        case ArtifactKind::Usernames: return "usernames";
        case ArtifactKind::MacAddresses: return "mac_addresses";
        case ArtifactKind::ApiBehavior: return "api_behavior";
    }
    return "?";
}

const std::vector<Probe>& probe_catalog() {
    static const std::vector<Probe> catalog = {
        {ProbeId::ProcNames,
         "proc_names",
         {Category::Debugger, Category::Av, Category::Vm},
         ArtifactKind::ProcessNames,
         {ApiFunction::SnapshotProcesses},
         watchlist_keys::kProcessNames},
        {ProbeId::WindowNames,
         "window_names",
         {Category::Debugger},
         ArtifactKind::WindowNames,
         {ApiFunction::FindWindow},
         watchlist_keys::kWindowNames},
        {ProbeId::DebuggerFlag,
         "debugger_flag",
         {Category::Debugger},
         ArtifactKind::ApiBehavior,
         {ApiFunction::IsDebuggerPresent},
         ""},
        {ProbeId::HwDebugRegisters,
         "hw_debug_registers",
         {Category::Debugger},
         ArtifactKind::DebuggerRegisters,
         {ApiFunction::GetThreadContext},
         ""},
        {ProbeId::ModuleExports,
         "module_exports",
         {Category::Debugger, Category::Vm},
         ArtifactKind::ImportedFunctions,
         {ApiFunction::GetModuleHandle},
         watchlist_keys::kModuleNames},
        {ProbeId::RegistryArtifacts,
         "registry_artifacts",
         {Category::Debugger},
         ArtifactKind::RegistryNamesValues,
         {ApiFunction::RegOpenKey, ApiFunction::RegQueryValue},
         watchlist_keys::kRegistryKeys},
        {ProbeId::FolderNames,
         "folder_names",
         {Category::Av, Category::Vm},
         ArtifactKind::FolderNames,
         {ApiFunction::GetFileAttributes},
         watchlist_keys::kFolderNames},
        {ProbeId::DllNames,
         "dll_names",
         {Category::Vm},
         ArtifactKind::DllNames,
         {ApiFunction::CreateFile},
         watchlist_keys::kDllPaths},
        {ProbeId::Usernames,
         "usernames",
         {Category::Vm},
         ArtifactKind::Usernames,
         {ApiFunction::GetUsername},
         watchlist_keys::kUsernames},
        {ProbeId::MacPrefixes,
         "mac_prefixes",
         {Category::Vm},
         ArtifactKind::MacAddresses,
         {ApiFunction::GetAdapters},
         watchlist_keys::kMacOuis},
        {ProbeId::CursorStatic,
         "cursor_static",
         {Category::Debugger},
         ArtifactKind::ApiBehavior,
         {ApiFunction::GetCursorPos, ApiFunction::GetCursorPos},
         ""},
    };
    return catalog;
}

}  // namespace mirage::probes
