#pragma once

namespace eegbss {

// Entry point for the eegbss tool. Exit codes: 0 success, 1 runtime
// failure, 2 usage error.
int run(int argc, char** argv);

}  // namespace eegbss
