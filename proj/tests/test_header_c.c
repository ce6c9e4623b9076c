/* The public header must stay consumable from plain C. */

#include <stdio.h>
#include <string.h>

#include "mribench.h"

int main(void) {
  if (strlen(mrb_version()) == 0) {
    fprintf(stderr, "empty version string\n");
    return 1;
  }
  mrb_manifest* m = (mrb_manifest*)0;
  mrb_status status = mrb_manifest_scan("/nonexistent/mribench/root", &m);
  if (status != MRB_ERR_CONFIG || m != (mrb_manifest*)0) {
    fprintf(stderr, "expected config error from bad root\n");
    return 1;
  }
  if (strlen(mrb_last_error()) == 0) {
    fprintf(stderr, "missing error message\n");
    return 1;
  }
  printf("C header ok: %s\n", mrb_version());
  return 0;
}
