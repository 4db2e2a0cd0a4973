// Application wiring: upload a clip, show its spectrogram, drag-select a
// region, run the analysis, and draw the tick overlay.

import { ApiClient, ApiError, type ModelKind, type UploadInfo } from './api.js'
import {
  SelectionController,
  secondsToPixel,
  type ClipGeometry,
  type Selection,
} from './selection.js'
import { renderLegend, TickOverlay } from './overlay.js'

export interface AppElements {
  fileInput: HTMLInputElement
  modelSelect: HTMLSelectElement
  analyzeButton: HTMLButtonElement
  view: HTMLElement
  image: HTMLImageElement
  overlayLayer: HTMLElement
  status: HTMLElement
  legend: HTMLElement
}

export class App {
  readonly selectionController: SelectionController
  readonly overlay: TickOverlay
  private upload: UploadInfo | null = null
  private selection: Selection | null = null
  // stale-response guard: only the most recent analysis request may render
  private requestSeq = 0

  constructor(
    private readonly api: ApiClient,
    private readonly el: AppElements,
  ) {
    this.overlay = new TickOverlay(el.overlayLayer)
    this.selectionController = new SelectionController(el.view, (sel) => {
      this.selection = sel
    })
    renderLegend(el.legend)
    el.fileInput.addEventListener('change', () => {
      const file = el.fileInput.files?.[0]
      if (file) void this.uploadAndShow(file)
    })
    el.analyzeButton.addEventListener('click', () => void this.runAnalysis())
  }

  get currentUpload(): UploadInfo | null {
    return this.upload
  }

  get currentSelection(): Selection | null {
    return this.selection
  }

  private geometry(): ClipGeometry | null {
    if (!this.upload) return null
    return { durationS: this.upload.duration_s, width: this.upload.spectrogram_width }
  }

  setStatus(message: string, isError = false): void {
    this.el.status.textContent = message
    this.el.status.classList.toggle('error', isError)
  }

  async uploadAndShow(file: File | Blob): Promise<void> {
    this.overlay.clear()
    this.selection = null
    try {
      const bytes = await file.arrayBuffer()
      this.upload = await this.api.uploadAudio(bytes)
    } catch (err) {
      this.upload = null
      this.selectionController.setGeometry(null)
      this.setStatus(err instanceof ApiError ? err.message : `upload failed: ${err}`, true)
      return
    }
    // 1:1 zoom: the image is laid out at native column resolution
    this.el.image.src = this.api.spectrogramUrl(this.upload.id)
    this.el.image.style.width = `${this.upload.spectrogram_width}px`
    this.el.image.style.height = `${this.upload.spectrogram_height}px`
    this.el.view.style.width = `${this.upload.spectrogram_width}px`
    this.selectionController.setGeometry(this.geometry()!)
    this.setStatus(
      `loaded ${this.upload.duration_s.toFixed(2)} s at ${this.upload.sample_rate} Hz; ` +
        'drag across the image to select a region',
    )
  }

  /** The selection analyzed when nothing is dragged: the whole clip. */
  effectiveSelection(): Selection | null {
    if (this.selection) return this.selection
    if (!this.upload) return null
    return { start_s: 0, end_s: this.upload.duration_s }
  }

  async runAnalysis(): Promise<void> {
    const upload = this.upload
    const selection = this.effectiveSelection()
    if (!upload || !selection) {
      this.setStatus('upload a WAV clip first', true)
      return
    }
    const model = this.el.modelSelect.value as ModelKind
    const seq = ++this.requestSeq
    this.setStatus(`analyzing with ${model}...`)
    try {
      const analysis = await this.api.analyze(upload.id, selection.start_s, selection.end_s, model)
      if (seq !== this.requestSeq) return // superseded by a newer request
      const geometry = this.geometry()!
      const startPx = Math.round(secondsToPixel(analysis.start_s, geometry))
      this.overlay.render(analysis, startPx)
      this.setStatus(
        `${analysis.ticks.length} ticks, ${analysis.shift_markers.length} register shifts (${model})`,
      )
    } catch (err) {
      if (seq !== this.requestSeq) return
      this.overlay.clear()
      this.setStatus(err instanceof ApiError ? err.message : `analysis failed: ${err}`, true)
    }
  }
}
