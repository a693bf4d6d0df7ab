import { api, type FeedbackRecord } from "./api.js";

const VERDICTS = ["endorse", "reject", "unsure"] as const;

/**
 * Wires a feedback form. On success the form clears and a confirmation
 * shows; on validation or network failure the entered values stay put so
 * the user can correct and resubmit.
 */
export function setupFeedbackForm(
  form: HTMLFormElement,
  status: HTMLElement,
  submit: (record: FeedbackRecord) => Promise<unknown> = api.feedback,
): (event?: Event) => Promise<void> {
  const handler = async (event?: Event) => {
    event?.preventDefault();
    const data = new FormData(form);
    const modelId = String(data.get("model_id") ?? "");
    const verdict = String(data.get("verdict") ?? "");
    const note = String(data.get("note") ?? "");
    const sampleId = String(data.get("sample_id") ?? "drawn");

    if (!modelId) {
      status.textContent = "Select a model first.";
      status.className = "feedback-error";
      return;
    }
    if (!VERDICTS.includes(verdict as (typeof VERDICTS)[number])) {
      status.textContent = "Pick a verdict: endorse, reject or unsure.";
      status.className = "feedback-error";
      return;
    }
    try {
      await submit({
        model_id: modelId,
        sample_id: sampleId,
        verdict: verdict as FeedbackRecord["verdict"],
        note,
      });
    } catch (err) {
      status.textContent = `Could not record feedback: ${err}`;
      status.className = "feedback-error";
      return;
    }
    status.textContent = `Recorded "${verdict}" for ${modelId}.`;
    status.className = "feedback-ok";
    form.reset();
  };
  form.addEventListener("submit", handler);
  return handler;
}
