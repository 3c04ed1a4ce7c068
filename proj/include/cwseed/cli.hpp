#pragma once

namespace cwseed {

/// Entry point of the `cwseed` command. Returns 0 on success, 1 when the
/// solver does not converge and 2 on configuration or input errors.
int cli_main(int argc, char** argv);

}  // namespace cwseed
