#include "commands.hpp"

int main(int argc, char** argv)
{
    return tippingscope::cli::dispatch(argc, argv);
}
