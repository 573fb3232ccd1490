/*
 * Copyright (c) 2026 svbench contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Fixture task unsafe03.
 */

import org.sosy_lab.sv_benchmarks.Verifier;

public class Main {
  public static void main(String[] args) {
    int x = Verifier.nondetInt();
    Verifier.assume(x >= 0 && x < 10);
    int[] a = new int[10];
    a[x] = x;
    assert a[x] < 5;
  }
}
