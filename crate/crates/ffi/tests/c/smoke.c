#include <stdio.h>
#include <string.h>
#include "mveuler.h"

static int check(int cond, const char *what) {
  if (!cond) {
    const char *e = mve_last_error();
    fprintf(stderr, "failed: %s (%s)\n", what, e ? e : "no error");
  }
  return cond ? 0 : 1;
}

int main(void) {
  int bad = 0;
  MveFormula *abs = NULL, *theory = NULL, *broken = NULL;
  bad += check(mve_formula_parse("(x1*x1) | !(x1+x1)", &abs) == MVE_STATUS_OK, "parse");
  bad += check(mve_formula_parse("x1 * !x1", &theory) == MVE_STATUS_OK, "parse theory");
  bad += check(mve_formula_parse("x1 +", &broken) == MVE_STATUS_INVALID_INPUT, "parse error");
  bad += check(broken == NULL && mve_last_error() != NULL, "parse error message");

  int64_t e = -1;
  bad += check(mve_euler(abs, NULL, 1, MVE_METHOD_BOTH, &e) == MVE_STATUS_OK && e == 2, "E(|2x-1|) = 2");
  bad += check(mve_last_error() == NULL, "error cleared");
  bad += check(mve_euler(abs, theory, 0, MVE_METHOD_AUTO, &e) == MVE_STATUS_INCONSISTENT_THEORY && e == 0,
               "inconsistent theory");

  char *value = NULL;
  bad += check(mve_formula_eval(abs, "1/3", &value) == MVE_STATUS_OK && strcmp(value, "1/3") == 0, "eval");
  mve_string_free(value);

  char *json = NULL;
  bad += check(mve_report_json(abs, NULL, 1, MVE_METHOD_GEOMETRIC, &json) == MVE_STATUS_OK, "report");
  bad += check(json != NULL && strstr(json, "\"E\":2") != NULL, "report E");
  mve_string_free(json);

  mve_formula_free(abs);
  mve_formula_free(theory);
  printf("%s\n", bad ? "FAIL" : "OK");
  return bad;
}
