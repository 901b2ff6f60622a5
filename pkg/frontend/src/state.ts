/**
 * Client-side session state: a one-slot latest-snapshot buffer plus the
 * static scenario info. The client holds no world state of its own, so a
 * reconnect resynchronizes purely from the next snapshot.
 */

import { Snapshot, StaticInfo } from "./protocol.js";

export class SessionView {
  private latest: Snapshot | null = null;
  private staticInfo: StaticInfo | null = null;
  private errorBanner: string | null = null;
  private eventLog: string[] = [];
  private ended: Record<string, unknown> | null = null;

  acceptSnapshot(snap: Snapshot): void {
    this.latest = snap; // one-slot buffer: older frames are dropped
    if (snap.static) this.staticInfo = snap.static;
    this.errorBanner = null;
  }

  acceptEvent(payload: Record<string, unknown>): void {
    const kind = typeof payload.event === "string" ? payload.event : "event";
    this.eventLog.push(kind);
    if (this.eventLog.length > 50) this.eventLog.shift();
  }

  acceptEnd(summary: Record<string, unknown>): void {
    this.ended = summary;
  }

  malformed(): void {
    this.errorBanner = "malformed message from server; showing last good frame";
  }

  get snapshot(): Snapshot | null {
    return this.latest;
  }

  get info(): StaticInfo | null {
    return this.staticInfo;
  }

  get banner(): string | null {
    return this.errorBanner;
  }

  get recentEvents(): readonly string[] {
    return this.eventLog;
  }

  get endSummary(): Record<string, unknown> | null {
    return this.ended;
  }
}
