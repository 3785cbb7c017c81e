// Dismissible error notices; server problem documents surface here.

import { ApiError } from "./api";

export class NoticeArea {
  private container: HTMLElement;

  constructor(parent: HTMLElement) {
    this.container = document.createElement("div");
    this.container.className = "notices";
    parent.appendChild(this.container);
  }

  show(message: string): void {
    const notice = document.createElement("div");
    notice.className = "notice";
    const text = document.createElement("span");
    text.textContent = message;
    const dismiss = document.createElement("button");
    dismiss.textContent = "×";
    dismiss.className = "notice-dismiss";
    dismiss.addEventListener("click", () => notice.remove());
    notice.append(text, dismiss);
    this.container.appendChild(notice);
  }

  showError(err: unknown): void {
    if (err instanceof ApiError) {
      this.show(`${err.code}: ${err.message}`);
    } else {
      this.show(String(err));
    }
  }
}
