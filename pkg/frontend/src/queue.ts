/** Single serialized event queue.
 *
 * Network callbacks and pointer handlers both push here, so their effects
 * apply in arrival order even when a handler triggers further events; a
 * re-entrant push appends instead of nesting.
 */

export class EventQueue {
  private items: Array<() => void> = [];
  private draining = false;

  push(fn: () => void): void {
    this.items.push(fn);
    if (this.draining) return;
    this.draining = true;
    try {
      let next: (() => void) | undefined;
      while ((next = this.items.shift()) !== undefined) next();
    } finally {
      this.draining = false;
    }
  }
}
