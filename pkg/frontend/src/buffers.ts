// Rolling time-series buffer for the strip charts: keeps the last windowS
// seconds of samples, bounded regardless of how fast frames arrive.

export class RollingBuffer {
  readonly windowS: number;
  private readonly maxSamples: number;
  private ts: number[] = [];
  private vs: number[] = [];

  constructor(windowS: number, maxSamples = 4096) {
    this.windowS = windowS;
    this.maxSamples = maxSamples;
  }

  push(t: number, v: number): void {
    this.ts.push(t);
    this.vs.push(v);
    const cutoff = t - this.windowS;
    let drop = 0;
    while (drop < this.ts.length && this.ts[drop] < cutoff) drop++;
    if (this.ts.length - drop > this.maxSamples) drop = this.ts.length - this.maxSamples;
    if (drop > 0) {
      this.ts = this.ts.slice(drop);
      this.vs = this.vs.slice(drop);
    }
  }

  get length(): number {
    return this.ts.length;
  }

  latestT(): number | null {
    return this.ts.length ? this.ts[this.ts.length - 1] : null;
  }

  series(): { ts: readonly number[]; vs: readonly number[] } {
    return { ts: this.ts, vs: this.vs };
  }

  clear(): void {
    this.ts = [];
    this.vs = [];
  }
}
