#include "eegbss/cli.hpp"

int main(int argc, char** argv) { return eegbss::run(argc, argv); }
