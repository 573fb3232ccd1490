/*
 * Copyright (c) 2026 svbench contributors
 */
public class Helper {
  static int twice(int x) { return 2 * x; }
}
