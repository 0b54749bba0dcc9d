#include "gcl/exec.hpp"

namespace gcl {

ExecConfig& current_exec()
{
    thread_local ExecConfig cfg;
    return cfg;
}

} // namespace gcl
